//! `pwcis`: checks, sweeps and reconstructions for perturbed lattices.
//!
//! Exit codes: 0 PASS or success, 1 FAIL, 2 INCONCLUSIVE, 64 usage error,
//! 65 data error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pwcis::experiments::Orientation;
use pwcis::interp::GridSpec;
use pwcis::{Error, ExponentP, FamilyKind, FamilySpec};

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

#[derive(Debug, Parser)]
#[command(
    name = "pwcis",
    version,
    about = "Complete interpolating sequences for Paley-Wiener spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Separation, Carleson, density and (A_p) verdict for one sequence.
    Check(CheckArgs),
    /// Verdicts across perturbation magnitudes and orientations.
    Kadets(KadetsArgs),
    /// Origin-anchored (A_p) quotients at the critical magnitude.
    Counterexample(CounterexampleArgs),
    /// Exponent of F for the scaled perturbations k + α·δ_k.
    AlphaScaling(AlphaArgs),
    /// Discrete Hilbert operator probes against discrete (A_p) quotients.
    Lemma1(Lemma1Args),
    /// S and F on a grid, as CSV `x,re_S,im_S,F`.
    Genfn(GenfnArgs),
    /// Reconstruction from node samples, as CSV `x,re_f,im_f`.
    Interp(InterpArgs),
    /// Writes a generated node family as CSV `k,re,im`.
    Family(FamilyArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Nodes CSV file with header k,re,im.
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Generated family: kind[:d[:delta0=..][:seed=..]], e.g. signed:0.25.
    #[arg(long, allow_hyphen_values = true)]
    family: Option<FamilySpec>,
}

#[derive(Debug, Clone, Args)]
struct Thresholds {
    /// Relative slope per e-fold above which a quotient chain grows.
    #[arg(long, default_value_t = 0.05)]
    slope: f64,
    /// Minimal r2 of a growth fit.
    #[arg(long, default_value_t = 0.9)]
    r2: f64,
    /// Largest relative change over the last doubling that counts as stable.
    #[arg(long, default_value_t = 0.05)]
    stabilization: f64,
}

#[derive(Debug, Clone, Args)]
struct CheckOpts {
    /// Exponent p in (1, inf).
    #[arg(long, value_parser = parse_p)]
    p: ExponentP,
    /// Node window |k| <= K for generated families.
    #[arg(long = "K", default_value_t = 1 << 15)]
    k: u32,
    /// (A_p) intervals lie in [-xmax, xmax].
    #[arg(long, default_value_t = 8192.0)]
    xmax: f64,
    #[command(flatten)]
    thresholds: Thresholds,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    opts: CheckOpts,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Append discrete Hilbert operator probes to the report.
    #[arg(long)]
    with_operator_probe: bool,
}

#[derive(Debug, Args)]
struct KadetsArgs {
    #[command(flatten)]
    opts: CheckOpts,
    /// Perturbation magnitudes in (0, 1/2).
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2, 0.25])]
    d: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values = ["outward", "inward"])]
    orientations: Vec<Orientation>,
    #[arg(long, value_delimiter = ',', default_values = ["signed", "constant_shift"])]
    kinds: Vec<FamilyKind>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CounterexampleArgs {
    #[arg(long, value_parser = parse_p)]
    p: ExponentP,
    /// Magnitude |δ|; defaults to 1/(2p').
    #[arg(long)]
    d: Option<f64>,
    /// Right ends X; defaults to 2^5 ... 2^13.
    #[arg(long, value_delimiter = ',')]
    xs: Vec<f64>,
    #[arg(long = "K", default_value_t = 1 << 15)]
    k: u32,
    #[command(flatten)]
    thresholds: Thresholds,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AlphaArgs {
    /// Base family, e.g. signed:0.2.
    #[arg(long, allow_hyphen_values = true)]
    family: FamilySpec,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 0.25, 0.5, 1.0])]
    alphas: Vec<f64>,
    #[arg(long = "K", default_value_t = 50_000)]
    k: u32,
    /// Exponents are fitted over [xmin, xmax].
    #[arg(long, default_value_t = 32.0)]
    xmin: f64,
    #[arg(long, default_value_t = 4096.0)]
    xmax: f64,
    /// Allowed |exponent - α·base exponent|.
    #[arg(long, default_value_t = 0.1)]
    tol: f64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Lemma1Args {
    #[arg(long, value_parser = parse_p)]
    p: ExponentP,
    /// Signed-family magnitudes whose |S'(γ_j)|^p weights enter the matrix
    /// (0 is the lattice).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 0.1, 0.2])]
    d: Vec<f64>,
    #[arg(long = "K", default_value_t = 1 << 12)]
    k: u32,
    /// Section half-widths.
    #[arg(long, value_delimiter = ',', default_values_t = [16, 32, 64, 128, 256, 512])]
    windows: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    stabilization: f64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenfnArgs {
    #[command(flatten)]
    source: Source,
    /// xmin:xmax:step.
    #[arg(long, allow_hyphen_values = true)]
    grid: GridSpec,
    #[arg(long = "K", default_value_t = 100_000)]
    k: u32,
    /// CSV output (stdout if absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InterpArgs {
    #[command(flatten)]
    source: Source,
    /// Samples CSV with header k,re_a,im_a.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    grid: GridSpec,
    #[arg(long = "K", default_value_t = 100_000)]
    k: u32,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long)]
    kind: FamilyKind,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    d: f64,
    #[arg(long = "K")]
    k: u32,
    /// δ_0 of the signed family.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    delta0: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn parse_p(s: &str) -> Result<ExponentP, String> {
    let p: f64 = s.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
    ExponentP::new(p).map_err(|e| e.to_string())
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::InvalidExponent(_) | Error::Precondition(_) | Error::InvalidFamily(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
