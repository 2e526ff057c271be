use crate::input::{parse_f64_list, parse_u64_list, F64List, HamFormat, StateSpec, U64List};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "lindff", version, about = "Fast-forwarded dephasing Lindbladians, phase estimation and Gibbs states")]
pub struct Cli {
    /// Master seed; per-cell seeds are derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Record file (JSON lines). Defaults to stdout, or to
    /// `$LINDFF_OUT_DIR/<command>.jsonl` when that variable is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV file for commands that produce a table. Defaults to
    /// `$LINDFF_OUT_DIR/<command>.csv` when that variable is set.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Add wall-clock seconds to every record. Timed records are not
    /// byte-reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a state under a dephasing Lindbladian.
    Evolve(EvolveArgs),
    /// Estimate an eigenvalue or prepare an eigenstate.
    Qpe(QpeArgs),
    /// Prepare Gibbs states over a list of inverse temperatures.
    Gibbs(GibbsArgs),
    /// Decide whether an oracle has marked inputs.
    AeDemo(AeArgs),
    /// Binomial and discrete-Gaussian state preparation.
    #[command(subcommand)]
    Stateprep(StateprepCommand),
    /// Exact binomial tails against the concentration bounds.
    Bounds(BoundsArgs),
    /// Scaling suites with fitted log-log slopes.
    #[command(subcommand)]
    Bench(BenchCommand),
}

impl Command {
    /// Base name for files written into the output directory.
    pub fn file_stem(&self) -> String {
        match self {
            Command::Evolve(_) => "evolve".into(),
            Command::Qpe(_) => "qpe".into(),
            Command::Gibbs(_) => "gibbs".into(),
            Command::AeDemo(_) => "ae-demo".into(),
            Command::Stateprep(StateprepCommand::Distance(_)) => "stateprep-distance".into(),
            Command::Stateprep(StateprepCommand::Schedule(_)) => "stateprep-schedule".into(),
            Command::Bounds(_) => "bounds".into(),
            Command::Bench(BenchCommand::FfVsDilated(_)) => "bench-ff-vs-dilated".into(),
            Command::Bench(BenchCommand::QpeScaling(_)) => "bench-qpe-scaling".into(),
        }
    }
}

#[derive(Debug, Args)]
pub struct HamArgs {
    /// Hamiltonian file: Pauli sum (`coef PAULIS` per line) or dense rows
    /// of `re,im` entries.
    #[arg(long)]
    pub ham: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = HamFormat::Auto)]
    pub format: HamFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Fast-forwarded circuit.
    Ff,
    /// Repeated dilated-Hamiltonian steps.
    Dilated,
    /// Closed-form propagator.
    Exact,
    /// Product of fast-forwarded factors for commuting jumps.
    ChoiFf,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub ham: HamArgs,
    /// Pauli jumps for `choi-ff`, e.g. `XI:0.1,IZ:0.2`.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Override the step count `N`.
    #[arg(long)]
    pub steps: Option<u64>,
    /// `plus`, `random`, `basis:K` or `eigen:K`.
    #[arg(long, default_value = "plus")]
    pub state: StateSpec,
    /// Divide the jump by its norm and multiply `t` by the squared norm.
    #[arg(long)]
    pub rescale: bool,
    /// Allow dilated step counts above the default limit.
    #[arg(long)]
    pub allow_large: bool,
    /// Run `choi-ff` even if the factors do not commute.
    #[arg(long)]
    pub allow_non_commuting: bool,
    /// Also report the trace distance to the exact propagator.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Standard,
    Slow,
    Fast,
}

#[derive(Debug, Args)]
pub struct QpeArgs {
    #[arg(long, value_enum)]
    pub route: Route,
    #[command(flatten)]
    pub ham: HamArgs,
    /// Evolution time (slow and fast routes).
    #[arg(long)]
    pub t: Option<f64>,
    /// Step count `N` (slow and fast routes).
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Register bits (standard route).
    #[arg(long, default_value_t = 8)]
    pub d: u32,
    /// Accuracy target of the fast route.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Input is an eigenvector of the `K`-th distinct eigenvalue.
    #[arg(long, conflicts_with = "state")]
    pub eigen: Option<usize>,
    #[arg(long, default_value = "plus")]
    pub state: StateSpec,
    /// Draw one outcome from the seed instead of reporting the mode.
    #[arg(long)]
    pub sample: bool,
    /// Include the full outcome distribution.
    #[arg(long)]
    pub distribution: bool,
    /// Prepare the eigenstate of this eigenspace instead of estimating.
    #[arg(long)]
    pub prepare: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GibbsArgs {
    /// Positive semidefinite `H_P` with norm at most 1, dimension at most 8.
    #[command(flatten)]
    pub ham: HamArgs,
    #[arg(long, value_parser = parse_f64_list, default_value = "1,2,4")]
    pub beta: F64List,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct AeArgs {
    #[arg(long, default_value_t = 4)]
    pub n_bits: u32,
    /// Marks inputs `0..W`.
    #[arg(long, default_value_t = 1, conflicts_with = "oracle")]
    pub marked: usize,
    /// Explicit truth table, one `0`/`1` per input.
    #[arg(long)]
    pub oracle: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub runs: u64,
    #[arg(long, default_value_t = 256.0)]
    pub t: f64,
    #[arg(long = "N", default_value_t = 4096)]
    pub n: u64,
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
}

#[derive(Debug, Subcommand)]
pub enum StateprepCommand {
    /// l2 distance between binomial and discrete-Gaussian amplitudes.
    Distance(DistanceArgs),
    /// Angle schedule for a discrete Gaussian.
    Schedule(ScheduleArgs),
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long = "N", value_parser = parse_u64_list, default_value = "64,128,256,512,1024,2048,4096")]
    pub n: U64List,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// Register size, a power of two.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 8.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    /// Include every level of angles.
    #[arg(long)]
    pub angles: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long = "N", value_parser = parse_u64_list, default_value = "1..200")]
    pub n: U64List,
    #[arg(long, value_parser = parse_f64_list, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub p: F64List,
    #[arg(long, value_parser = parse_f64_list, default_value = "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45")]
    pub c: F64List,
    /// Sizes for the pmf-versus-normal-density gap.
    #[arg(long, value_parser = parse_u64_list, default_value = "20,40,80,160")]
    pub gap_n: U64List,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Hamiltonian time of the fast-forwarded circuit and the dilated baseline.
    FfVsDilated(FfBenchArgs),
    /// RMS error against cost for the slow and fast phase-estimation routes.
    QpeScaling(QpeBenchArgs),
}

#[derive(Debug, Args)]
pub struct FfBenchArgs {
    #[arg(long, value_parser = parse_f64_list, default_value = "1,2,4,8,16,32,64")]
    pub t: F64List,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Also run both methods on a seeded random one-qubit jump and report
    /// trace distances to the exact result.
    #[arg(long)]
    pub simulate: bool,
}

#[derive(Debug, Args)]
pub struct QpeBenchArgs {
    #[arg(long, value_parser = parse_f64_list, default_value = "64,128,256,512,1024")]
    pub t: F64List,
    #[arg(long = "N", default_value_t = 4096)]
    pub n: u64,
    /// Eigenvalue of the single-level input.
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
}
