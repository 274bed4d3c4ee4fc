mod args;
mod commands;
mod output;
mod sweep;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use output::emit;

/// A numerical check or refinement that did not meet its tolerance (exit 3).
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

const EXIT_VALIDATION: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<NumericalFailure>() {
            return EXIT_CONVERGENCE;
        }
        if let Some(e) = cause.downcast_ref::<dlh_core::Error>() {
            return if e.is_numerical() { EXIT_CONVERGENCE } else { EXIT_VALIDATION };
        }
    }
    EXIT_VALIDATION
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DLH_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("DLH_THREADS must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot size the thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    let config = commands::load_config(cli.common.config.as_deref())?;
    let out = cli.common.out.as_deref();
    let format = cli.common.format;
    let artifact = match &cli.command {
        Command::Derive => commands::derive(&config)?,
        Command::Spectrum(a) => commands::spectrum(&config, a)?,
        Command::Displace(a) => commands::displace(&config, a)?,
        Command::Connection(a) => commands::connection(&config, a)?,
        Command::Phase(a) => commands::phase(&config, a)?,
        Command::Holonomy(a) => commands::holonomy(&config, a)?,
        Command::Sweep(a) => sweep::sweep(&config, a)?,
        Command::OracleCheck(a) => {
            let outcome = commands::oracle_check(a)?;
            emit(out, &outcome.artifact.render(format)?)?;
            match &a.text_out {
                Some(p) => output::write_atomic(p, &outcome.text)?,
                None => eprint!("{}", outcome.text),
            }
            if !outcome.passed {
                return Err(commands::oracle_failure());
            }
            return Ok(());
        }
    };
    emit(out, &artifact.render(format)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
