//! Deterministic SVG output: fixed canvas, two-decimal coordinates, no
//! timestamps or random ids, so identical inputs produce identical
//! bytes.

/// Pixel-space drawing surface.
pub struct Canvas {
    width: u32,
    height: u32,
    body: String,
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Self {
        let mut c = Self { width, height, body: String::new() };
        let (w, h) = (width, height);
        c.body.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n"
        ));
        c
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>\n",
            px(x),
            px(y),
            px(w),
            px(h)
        ));
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{}\"/>\n",
            px(x1),
            px(y1),
            px(x2),
            px(y2),
            px(width)
        ));
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64, closed: bool) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", px(*x), px(*y))).collect();
        let tag = if closed { "polygon" } else { "polyline" };
        self.body.push_str(&format!(
            "<{tag} points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{}\"/>\n",
            coords.join(" "),
            px(width)
        ));
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>\n",
            px(cx),
            px(cy),
            px(r)
        ));
    }

    pub fn text(&mut self, x: f64, y: f64, size: u32, content: &str) {
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"{size}\" fill=\"#222222\">{}</text>\n",
            px(x),
            px(y),
            escape(content)
        ));
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Affine map from a data rectangle to a pixel rectangle (y flipped).
#[derive(Clone, Copy)]
pub struct Frame {
    px0: f64,
    py0: f64,
    pw: f64,
    ph: f64,
    x0: f64,
    y0: f64,
    xs: f64,
    ys: f64,
}

impl Frame {
    /// `pixel = (x, y, w, h)`, `data = (xmin, xmax, ymin, ymax)`.
    pub fn new(pixel: (f64, f64, f64, f64), data: (f64, f64, f64, f64)) -> Self {
        let (px0, py0, pw, ph) = pixel;
        let (xmin, xmax, ymin, ymax) = data;
        let dx = (xmax - xmin).abs().max(1e-300);
        let dy = (ymax - ymin).abs().max(1e-300);
        Self { px0, py0, pw, ph, x0: xmin, y0: ymin, xs: pw / dx, ys: ph / dy }
    }

    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.px0 + (x - self.x0) * self.xs,
            self.py0 + self.ph - (y - self.y0) * self.ys,
        )
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (self.px0, self.py0, self.pw, self.ph)
    }
}

/// Symmetric data range covering a list of values with a small margin.
pub fn data_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = 0.05 * (hi - lo).max(1e-12);
    (lo - pad, hi + pad)
}
