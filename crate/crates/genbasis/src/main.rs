use clap::Parser;

use genbasis::cli::{self, Cli, EXIT_USAGE};

fn main() {
    let cli = Cli::parse();
    match cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e @ genbasis::Error::Input(_)) => {
            eprintln!("error: {e}");
            std::process::exit(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
