//! Command-line surface: subcommands, flags and the custom flag syntaxes
//! (`--n-range a..b`, `--mode mixed:<k>`, `--bipartition one-vs-rest:<k>`,
//! `--format csv,json,svg`).

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use hardy_core::analytics::Bipartition;
use hardy_core::circuit::CircuitMode;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "hardy-lab",
    version,
    about = "Datasets, plots and verification for an n-particle Hardy nonlocality construction",
    after_help = "Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.\n\
                  HARDY_LAB_THREADS caps the parallel fan-out over grid points."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Nonlocal probability over an (n, A) grid, with the per-n optima series
    Sweep(SweepArgs),
    /// Exact and sampled outcome tables for one circuit
    Histogram(HistogramArgs),
    /// Maximize the nonlocal probability over A for each n
    Optimize(OptimizeArgs),
    /// Integrate the nonlocal probability over A ∈ (0, 1)
    Integrate(IntegrateArgs),
    /// Entanglement entropy and negativity along an A grid
    Entropy(EntropyArgs),
    /// The large-n limit of the optimal nonlocal probability
    Asymptote(AsymptoteArgs),
    /// Certify the paradox conditions and cross-validate circuits
    Verify(VerifyArgs),
}

/// Inclusive integer range written `a..b`, or a single value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NRange {
    pub start: usize,
    pub end: usize,
}

impl NRange {
    pub fn values(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (
                a.parse().map_err(|_| format!("bad range start {a:?}"))?,
                b.parse().map_err(|_| format!("bad range end {b:?}"))?,
            ),
            None => {
                let v = s.parse().map_err(|_| format!("bad value {s:?}"))?;
                (v, v)
            }
        };
        if start < 2 || end < start {
            return Err(format!("range must satisfy 2 ≤ start ≤ end, got {s:?}"));
        }
        Ok(NRange { start, end })
    }
}

/// `prepare`, `mixed:<k>` or `full-cd`.
#[derive(Clone, Copy, Debug)]
pub struct ModeArg(pub CircuitMode);

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prepare" => Ok(ModeArg(CircuitMode::Prepare)),
            "full-cd" => Ok(ModeArg(CircuitMode::FullCd)),
            other => match other.strip_prefix("mixed:") {
                Some(k) => {
                    let k: usize = k.parse().map_err(|_| format!("bad site in {other:?}"))?;
                    Ok(ModeArg(CircuitMode::Mixed(k)))
                }
                None => Err(format!(
                    "mode must be prepare, mixed:<k> or full-cd, got {other:?}"
                )),
            },
        }
    }
}

/// `half` or `one-vs-rest:<k>`.
#[derive(Clone, Copy, Debug)]
pub struct BipartitionArg(pub Bipartition);

impl FromStr for BipartitionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half" => Ok(BipartitionArg(Bipartition::HalfChain)),
            other => match other.strip_prefix("one-vs-rest:") {
                Some(k) => {
                    let k: usize = k.parse().map_err(|_| format!("bad site in {other:?}"))?;
                    Ok(BipartitionArg(Bipartition::OneVsRest(k)))
                }
                None => Err(format!(
                    "bipartition must be half or one-vs-rest:<k>, got {other:?}"
                )),
            },
        }
    }
}

/// Comma-separated subset of {csv, json, svg}.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats {
            csv: true,
            json: true,
            svg: false,
        }
    }
}

impl FromStr for Formats {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut formats = Formats {
            csv: false,
            json: false,
            svg: false,
        };
        for part in s.split(',') {
            match part.trim() {
                "csv" => formats.csv = true,
                "json" => formats.json = true,
                "svg" => formats.svg = true,
                other => return Err(format!("unknown format {other:?}")),
            }
        }
        if !(formats.csv || formats.json || formats.svg) {
            return Err("at least one format is required".to_string());
        }
        Ok(formats)
    }
}

/// Flags shared by every dataset-producing subcommand.
#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output directory for the dataset files
    #[arg(long, default_value = "hardy_out")]
    pub out: PathBuf,
    /// Formats to emit: comma-separated subset of csv,json,svg
    #[arg(long, default_value = "csv,json")]
    pub format: Formats,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Ensemble sizes, `a..b` inclusive or a single value
    #[arg(long = "n-range", visible_alias = "n")]
    pub n_range: NRange,
    /// Grid step over the transform coefficient A ∈ (0, 1)
    #[arg(long = "a-step", default_value_t = 0.005)]
    pub a_step: f64,
    /// Shots per sampled estimate; 0 disables sampling
    #[arg(long, default_value_t = 20000)]
    pub shots: u64,
    /// Base RNG seed for the sampled estimates
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct HistogramArgs {
    /// Ensemble size
    #[arg(long)]
    pub n: usize,
    /// Transform coefficient A ∈ (0, 1), equal on every site
    #[arg(long)]
    pub a: f64,
    /// Circuit: prepare, mixed:<k> or full-cd
    #[arg(long)]
    pub mode: ModeArg,
    /// Shots for the sampled table
    #[arg(long, default_value_t = 20000)]
    pub shots: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long = "n-range", visible_alias = "n")]
    pub n_range: NRange,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[arg(long = "n-range", visible_alias = "n")]
    pub n_range: NRange,
    /// Absolute quadrature tolerance
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    /// Ensemble sizes, `a..b` inclusive or a single value
    #[arg(long = "n-range", visible_alias = "n")]
    pub n_range: NRange,
    /// Fixed coefficient; omit to sweep the grid set by --a-step
    #[arg(long)]
    pub a: Option<f64>,
    /// Grid step over A when no fixed --a is given
    #[arg(long = "a-step", default_value_t = 0.005)]
    pub a_step: f64,
    /// Bipartition: half or one-vs-rest:<k>
    #[arg(long, default_value = "half")]
    pub bipartition: BipartitionArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AsymptoteArgs {
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Ensemble size
    #[arg(long)]
    pub n: usize,
    /// Transform coefficient A ∈ (0, 1), equal on every site
    #[arg(long)]
    pub a: f64,
    /// Tolerance for the analytic condition checks
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Tolerance for the circuit-vs-analytic cross-validation
    #[arg(long = "circuit-tol", default_value_t = 1e-9)]
    pub circuit_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}
