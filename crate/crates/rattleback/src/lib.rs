//! Conservative dynamics of the rattleback vector field
//!
//!   dx/dt = lambda * x * z
//!   dy/dt = -y * z
//!   dz/dt = y^2 - lambda * x^2
//!
//! for a shape parameter `lambda > 0`. The flow conserves the energy
//! `H = x * y^lambda` and the Casimir `C = (x^2 + y^2 + z^2) / 2`, and the
//! crate exposes the machinery built on those two invariants: the bivector
//! realization and its unimodular deformations ([`model`]), fixed-step and
//! adaptive integrators with section/period measurement ([`integrate`]),
//! the energy-Casimir image with stratum classification and fiber tracing
//! ([`ec_map`]), closed-form heteroclinic orbits ([`heteroclinic`]), an
//! isospectral matrix pair ([`lax`]), and conservative feedback
//! perturbations that make selected invariant sets attracting
//! ([`stabilize`]).
//!
//! The crate is `no_std`-compatible (it needs `alloc`); the companion
//! `rattleback-cli` crate carries file formats and the command-line
//! harness.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ec_map;
pub mod error;
pub mod heteroclinic;
pub mod integrate;
pub mod lax;
pub mod model;
pub mod stabilize;
mod state;

pub use error::{Error, Result};
pub use model::{ModelParams, RealizationParams};
pub use state::State3;
