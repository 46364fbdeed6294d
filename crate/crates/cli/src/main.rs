use std::process::ExitCode;

use clap::Parser;
use wiretap_cli::error::exit;
use wiretap_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version are reported through the error path too.
            let code = if e.use_stderr() {
                exit::VALIDATION
            } else {
                exit::SUCCESS
            };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
