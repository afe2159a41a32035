use clap::Parser;
use rattleback_cli::app;

fn main() {
    let cli = app::Cli::parse();
    if let Err(e) = app::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
