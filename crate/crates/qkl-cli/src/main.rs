use clap::Parser;
use qkl_cli::config::Cli;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match qkl_cli::execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qkl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
