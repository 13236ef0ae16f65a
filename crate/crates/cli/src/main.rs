use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use framelab::{dispatch, Command, Format, PresetName, RunConfig};

/// Frame bounds and spectral diagnostics for iterative systems of normal operators.
#[derive(Debug, Parser)]
#[command(name = "framelab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// System configuration (JSON); required by every command except sweep.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report destination; only the summary line is printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Completeness tolerance (frame-bounds) or separation threshold (carleson).
    #[arg(long)]
    tol: Option<f64>,
    /// Phase seed of the annulus preset.
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Sweep dimensions, e.g. 8,16,32,64.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, value_enum)]
    preset: Option<PresetName>,
    /// Command parameters as key=value; repeat or separate with commas.
    #[arg(long = "param", value_delimiter = ',', value_parser = key_value)]
    params: Vec<(String, String)>,
}

fn key_value(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got {s:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        command: cli.command,
        config: cli.config,
        out: cli.out,
        format: cli.format,
        tol: cli.tol,
        rng_seed: cli.rng_seed,
        dims: cli.dims,
        preset: cli.preset,
        params: cli.params.into_iter().collect(),
    };
    let outcome = dispatch(&cfg);
    println!("{}", outcome.summary);
    ExitCode::from(outcome.status as u8)
}
