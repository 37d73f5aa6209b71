use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = real_al::cli::Cli::parse();
    match real_al::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
