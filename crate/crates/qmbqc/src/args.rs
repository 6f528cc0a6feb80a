use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qmbqc",
    version,
    about = "Qudit measurement-based computation: generate, convert, rewrite, simulate, verify and analyze"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Generate a circuit instance as JSON.
    Gen(GenArgs),
    /// Convert between circuits and patterns.
    Convert(ConvertArgs),
    /// Apply a pattern rewrite pass.
    Rewrite(RewriteArgs),
    /// Simulate a circuit or pattern on one input.
    Run(RunArgs),
    /// Compare two artifacts by simulation and report the worst infidelity.
    Verify(VerifyArgs),
    /// Depth, size and entanglement report, or a scaling sweep over n.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Random circuit over {CZ, v(theta)}.
    Guni,
    /// Random circuit over {F, P, CZ}.
    Clifford,
    /// A chain of CZ gates.
    Cascade,
    /// One fan-out gate from qudit 0 onto the other n.
    Fanout,
    /// Random circuit over {CX^k, CZ^k}.
    Cpauli,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Gate count for the random families (default 5n).
    #[arg(long)]
    pub gates: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Conversion {
    /// Circuit to its composite pattern (one basic pattern per gate).
    Def7,
    /// Circuit to a completely standard pattern with a cluster-style
    /// entangling layer of bounded degree.
    Def8,
    /// Standard pattern to its coherent (measurement-free) circuit.
    Def9,
    /// CX/CZ circuit, or completely standard pattern, to a constant-depth
    /// fan-out circuit.
    FanoutCompile,
    /// Clifford circuit to a constant-depth pattern (or fan-out circuit
    /// with `--target circuit`).
    CliffordConst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliffordTargetArg {
    Pattern,
    Circuit,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    #[arg(value_enum)]
    pub conversion: Conversion,
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the conversion report as JSON to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CliffordTargetArg::Pattern)]
    pub target: CliffordTargetArg,
    /// Format of the report printed on stderr.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pass {
    Standardise,
    Pauli,
    Shift,
    Complete,
}

#[derive(Args, Debug)]
pub struct RewriteArgs {
    #[arg(value_enum)]
    pub pass: Pass,
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sampled,
    Forced,
    #[value(name = "all_branches")]
    AllBranches,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Sampled)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Forced outcomes as `qudit=value` pairs, e.g. `1=0,2=2`.
    #[arg(long)]
    pub outcomes: Option<String>,
    /// Basis input digits in input order, e.g. `0,1` (default all zero).
    #[arg(long, conflicts_with = "random_input")]
    pub state: Option<String>,
    /// Use a random input state drawn from `--seed`.
    #[arg(long)]
    pub random_input: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Random input states on top of every basis state.
    #[arg(long, default_value_t = 5)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample this many runs per input instead of enumerating all branches
    /// (automatic, 16 runs, when there are more than 4096 branches).
    #[arg(long)]
    pub sampled: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Artifact to analyze (not used with `--sweep`).
    #[arg(required_unless_present = "sweep")]
    pub input: Option<PathBuf>,
    /// Scaling sweep such as `n=2..6` (inclusive).
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, value_enum, default_value_t = Family::Clifford)]
    pub family: Family,
    /// Conversion applied to each generated instance.
    #[arg(long, value_enum)]
    pub convert: Option<Conversion>,
    #[arg(long, value_enum, default_value_t = CliffordTargetArg::Pattern)]
    pub target: CliffordTargetArg,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Gates per qudit for random families.
    #[arg(long, default_value_t = 5)]
    pub gates_per_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
