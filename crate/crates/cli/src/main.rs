use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};

mod commands;
mod config;
mod output;

use config::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] conductor_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

/// Counting and equidistribution computations for automorphic forms of
/// bounded analytic conductor.
///
/// Settings come from defaults, then `--config FILE` (flat `key=value`
/// lines, `#` comments), then command-line flags. Config keys: field,
/// ramified, convention, c_even, c_odd, c_ds, pmax, rmax, nmax, qtol,
/// cutoff, format, out, threads.
#[derive(Parser, Debug)]
#[command(name = "conductor", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: commands::Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Read settings from a key=value file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit CSV (the default).
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// Emit JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads. Never changes results. [default: all cores]
    #[arg(long, global = true, allow_hyphen_values = true)]
    threads: Option<String>,
    /// Number field: Q or Q(sqrt,m). [default: Q]
    #[arg(long, global = true)]
    field: Option<String>,
    /// Archimedean conductor convention: paper23 or product-form. [default: paper23]
    #[arg(long, global = true)]
    convention: Option<String>,
    /// Weight of even principal series at split real places. [default: 1/(4 pi)]
    #[arg(long = "c-even", global = true, allow_hyphen_values = true)]
    c_even: Option<String>,
    /// Weight of odd principal series at split real places. [default: 1/(4 pi)]
    #[arg(long = "c-odd", global = true, allow_hyphen_values = true)]
    c_odd: Option<String>,
    /// Weight of discrete series at split real places. [default: 1/(4 pi)]
    #[arg(long = "c-ds", global = true, allow_hyphen_values = true)]
    c_ds: Option<String>,
    /// Euler product cutoff on prime norms. [default: 100000]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pmax: Option<String>,
    /// Discrete-series terms before the tail estimate. [default: 1000]
    #[arg(long, global = true, allow_hyphen_values = true)]
    rmax: Option<String>,
    /// Compact-place terms before the tail estimate. [default: 1000]
    #[arg(long, global = true, allow_hyphen_values = true)]
    nmax: Option<String>,
    /// Quadrature tolerance. [default: 1e-8]
    #[arg(long, global = true, allow_hyphen_values = true)]
    qtol: Option<String>,
    /// Upper limit of principal-series integrals. [default: 1000]
    #[arg(long, global = true, allow_hyphen_values = true)]
    cutoff: Option<String>,
}

fn effective_config(g: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut config = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let overrides = [
        ("field", "field", &g.field),
        ("convention", "convention", &g.convention),
        ("c-even", "c_even", &g.c_even),
        ("c-odd", "c_odd", &g.c_odd),
        ("c-ds", "c_ds", &g.c_ds),
        ("pmax", "pmax", &g.pmax),
        ("rmax", "rmax", &g.rmax),
        ("nmax", "nmax", &g.nmax),
        ("qtol", "qtol", &g.qtol),
        ("cutoff", "cutoff", &g.cutoff),
        ("out", "out", &g.out),
        ("threads", "threads", &g.threads),
    ];
    for (flag, key, value) in overrides {
        if let Some(v) = value {
            config
                .set(key, v)
                .map_err(|e| CliError::Usage(e.replacen(&format!("{key}:"), &format!("--{flag}:"), 1)))?;
        }
    }
    if g.json {
        config.format = Format::Json;
    } else if g.csv {
        config.format = Format::Csv;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = effective_config(&cli.global)?;
    if let Some(n) = config.threads {
        // a pool that already exists is fine: the hint never affects values
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let report = commands::execute(&cli.command, &config)?;
    let text = report.render(config.format)?;
    match &config.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
