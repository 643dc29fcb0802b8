use clap::Parser;
use cpatchbls_cli::{commands::run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code);
    }
}
