use std::process::ExitCode;

use clap::Parser;
use moea_harness::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match execute(cli, &mut stdout) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("moea: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
