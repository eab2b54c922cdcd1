use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use qharness::cli::{execute, threads_from_env, Cli, CliError};

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("cannot start {n} threads: {e}")))?;
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let pass = execute(&cli.command, &mut out)?;
    out.flush()?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qharness: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
