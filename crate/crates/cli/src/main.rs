use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use renyi_cli::{run, Cli, CliError, EXIT_INPUT_ERROR};

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let outcome = match &cli.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            let outcome = run(cli, &mut w)?;
            w.flush()?;
            outcome
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let outcome = run(cli, &mut w)?;
            w.flush()?;
            outcome
        }
    };
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
