//! Runs a shift sweep from a TOML config and prints the resulting table.
//!
//! `cargo run --example sweep_from_config -- [config.toml] [out_dir]`

use std::path::PathBuf;

use infonls::io::{parse_config, run_experiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/shift_sweep.toml"));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("infonls_sweep"));

    let config = parse_config(&std::fs::read_to_string(&path)?)?;
    let manifest = run_experiment(&config, &out)?;
    println!("{} in {:.3} s, input hash {}", manifest.command, manifest.wall_time_seconds, manifest.input_hash);
    for file in &manifest.outputs {
        println!("--- {}", out.join(file).display());
        print!("{}", std::fs::read_to_string(out.join(file))?);
    }
    Ok(())
}
