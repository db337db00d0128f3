//! `infonls <command> --config <path> [--out <dir>] [--threads N]`
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use infonls::io::{configured_out_dir, parse_config, run_experiment, Command};
use infonls::Error;

#[derive(Parser)]
#[command(version, about = "Regularized KL nonlinear Schrodinger experiments")]
struct Cli {
    /// evolve | spectrum | shift-sweep | eta-opt | exact-verify | cotangent | measures
    command: String,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `run.out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<(), Error> {
    let text = std::fs::read_to_string(&cli.config)?;
    let config = parse_config(&text)?;
    let requested = Command::parse(&cli.command)
        .ok_or_else(|| Error::ConfigValidation { line: 0, message: format!("unknown command {:?}", cli.command) })?;
    if requested != config.command {
        return Err(Error::ConfigValidation {
            line: 0,
            message: format!("command {:?} does not match the config's command {:?}", cli.command, config.command.as_str()),
        });
    }
    let out = cli.out.unwrap_or_else(|| configured_out_dir(&config));
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ConfigValidation { line: 0, message: format!("thread pool: {e}") })?;
    let manifest = pool.install(|| run_experiment(&config, &out))?;
    for f in &manifest.outputs {
        println!("{}", out.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(i32::from(&e) as u8)
        }
    }
}
