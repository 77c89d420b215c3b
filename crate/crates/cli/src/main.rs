mod args;
mod output;
mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("zcorr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
