//! Command-line flags and `--config` files.
//!
//! A config file holds `key = value` lines with the same names as the flags.
//! Its entries are spliced in ahead of the command line, so flags given on
//! the command line win.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "cherry",
    version,
    about = "Circle maps with a flat interval: tuning, scaling ratios, geometry and dimension"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Tune a map to a target rotation number and write its descriptor.
    Tune(TuneArgs),
    /// Compute the scaling-ratio series of a tuned map.
    Ratios(SeriesArgs),
    /// Run the inequality suite; exits 0 iff there are no hard failures.
    Verify(VerifyArgs),
    /// Print the geometry verdict for a rotation number and exponents.
    Classify(ClassifyArgs),
    /// Trace the transition curve lambda_u = 1.
    Curve(CurveArgs),
    /// Estimate the dimension of the non-wandering set.
    Dim(DimArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TuneArgs {
    #[arg(long)]
    pub l1: String,
    #[arg(long)]
    pub l2: String,
    /// Flat arc as `left,length`.
    #[arg(long, default_value = "0.015,0.97")]
    pub flat: String,
    /// Target rotation number: `golden`, `[2]rep`, `[1,2]rep`, `[1]+[2]rep`.
    #[arg(long)]
    pub rho: String,
    /// Series depth the map must support.
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value_t = 512)]
    pub prec: usize,
    /// Map descriptor to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SeriesArgs {
    /// Map descriptor written by `tune`.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub depth: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub series: SeriesArgs,
    /// First level at which failures count.
    #[arg(long, default_value_t = cherry_core::ratios::DEFAULT_N0)]
    pub n0: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub l1: String,
    #[arg(long)]
    pub l2: String,
    #[arg(long, default_value_t = 128)]
    pub prec: usize,
    /// Optional output directory for `verdict.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    /// Grid of `l1` values as `start:stop:step`.
    #[arg(long)]
    pub l1: String,
    #[arg(long, default_value_t = 128)]
    pub prec: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DimArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub series: SeriesArgs,
    /// First partition level in the estimate.
    #[arg(long, default_value_t = 4)]
    pub from: usize,
    /// Bounded-side map for the dichotomy report; `--map` is the degenerate side.
    #[arg(long)]
    pub compare: Option<PathBuf>,
}

/// Reads `key = value` lines into `--key value` arguments.
pub fn config_args(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
        let k = k.trim();
        if k.is_empty() || k == "config" {
            return Err(format!("config line {}: bad key `{k}`", i + 1));
        }
        out.push(format!("--{k}"));
        out.push(v.trim().trim_matches('"').to_string());
    }
    Ok(out)
}

/// Expands `--config <path>` (or `--config=<path>`) in place: the file's
/// arguments go right after the subcommand, ahead of every other flag.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut files = Vec::new();
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            files.push(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            files.push(p.to_string());
        } else {
            rest.push(a);
        }
    }
    if files.is_empty() {
        return Ok(rest);
    }
    let mut injected = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| format!("config {f}: {e}"))?;
        injected.extend(config_args(&text)?);
    }
    // Program name, then the subcommand, then the file's flags.
    let split = rest.len().min(2);
    let mut out: Vec<String> = rest[..split].to_vec();
    out.extend(injected);
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}
