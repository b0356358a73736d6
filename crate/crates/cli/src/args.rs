use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mnae::sat::DEFAULT_EXHAUSTIVE_CAP;
use mnae::spectra::DEFAULT_DIM_CAP;

#[derive(Parser, Debug)]
#[command(
    name = "mnae",
    version,
    about = "Monotone NAE-3SAT Hamiltonians: spectra, eigenstate entropy, gap scans"
)]
#[command(
    after_help = "Exit codes: 0 ok, 1 input or validation error, 2 resource cap exceeded, 3 report failure under --strict."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random instance with a prescribed number of solutions.
    Gen(GenArgs),
    /// Enumerate satisfying assignments by brute force.
    Solve(SolveArgs),
    /// Diagonalize a Hamiltonian and write its ascending eigenvalues.
    Spectrum(SpectrumArgs),
    /// Half-chain (or custom cut) entanglement entropy of every eigenstate.
    Entropy(EntropyArgs),
    /// Low-lying gaps along H(s) = (1 - s) H0 + s Hp.
    Gapscan(GapscanArgs),
}

#[derive(Args, Debug)]
pub struct Caps {
    /// Largest qubit count for exhaustive enumeration.
    #[arg(long, env = "MNAE_EXHAUSTIVE_CAP", default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    pub exhaustive_cap: usize,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Required number of satisfying assignments (even).
    #[arg(long)]
    pub solutions: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_tries: usize,
    /// Instance path; `.json` selects JSON, anything else the text format.
    /// A `<stem>.solutions.json` sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub caps: Caps,
}

/// Either an instance file or generator parameters.
#[derive(Args, Debug, Clone)]
pub struct Source {
    #[arg(long, conflicts_with_all = ["n", "m", "solutions", "seed", "max_tries"])]
    pub instance: Option<PathBuf>,
    /// Qubit count: generator size, or chain length for `ising` and `h0`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, requires = "n")]
    pub m: Option<usize>,
    #[arg(long, requires = "m")]
    pub solutions: Option<usize>,
    #[arg(long, requires = "m")]
    pub seed: Option<u64>,
    #[arg(long, requires = "m")]
    pub max_tries: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ham {
    Hp,
    Hent,
    HentGeneral,
    Ising,
    H0,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AChoice {
    UniformX,
    Identity,
    FromFile,
}

#[derive(Args, Debug)]
pub struct HamArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value = "hent")]
    pub ham: Ham,
    /// Operator A placed between clause projectors.
    #[arg(long, value_enum, default_value = "uniform-x")]
    pub a: AChoice,
    /// Coordinate-format operator for `--a from-file`.
    #[arg(long, required_if_eq("a", "from-file"))]
    pub a_file: Option<PathBuf>,
    /// Largest matrix dimension to diagonalize.
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    pub dim_cap: usize,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub ham: HamArgs,
    /// CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the operator in coordinate format.
    #[arg(long)]
    pub export_op: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    All,
    FirstQuarter,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub ham: HamArgs,
    /// Qubits kept in the subsystem, e.g. `8,9,10`; default keeps the upper half.
    #[arg(long, value_delimiter = ',')]
    pub keep: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "all")]
    pub window: Window,
    /// Ground-space tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON verification report; defaults to `<out-stem>.report.json`, or stderr.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Exit with status 3 when a verification check fails.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct GapscanArgs {
    #[command(flatten)]
    pub ham: HamArgs,
    /// Number of uniformly spaced s values in [0, 1].
    #[arg(long, default_value_t = mnae::anneal::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON minima summary; defaults to `<out-stem>.summary.json`, or stderr.
    #[arg(long)]
    pub report: Option<PathBuf>,
}
