mod args;
mod commands;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{run, Failure};

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("XORLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().map_err(|_| {
        Failure::Usage(format!(
            "XORLAB_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    if threads == 0 {
        return Err(Failure::Usage("XORLAB_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn execute(cli: &Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let verdict = run(cli, out.as_mut())?;
    out.flush()?;
    Ok(verdict.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
