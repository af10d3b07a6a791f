use clap::Parser;

use tsd_cli::cli::{run, AppError, Cli};

fn main() {
    // clap itself exits with status 2 on malformed arguments
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(AppError::Config(msg)) => {
            eprintln!("config error: {msg}");
            2
        }
        Err(AppError::Compute(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    };
    std::process::exit(code);
}
