use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tracelab::channel::AvoidTerm;
use tracelab::BitString;

#[derive(Debug, Parser)]
#[command(name = "tracelab", version, about = "Trace distributions of the deletion channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, env = "TRACELAB_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Print the padded pair for a given k.
    GenPair(GenPairArgs),
    /// Sample traces and write a trace dump.
    Sample(SampleArgs),
    /// Distances between the trace distributions of two strings.
    Distance(DistanceArgs),
    /// Chi-square surrogate of the padded pair at q = 1/2.
    Surrogate(SurrogateArgs),
    /// Power-law fit of a distance against n.
    Scaling(ScalingArgs),
    /// Empirical error rates of a test at several trace counts.
    Distinguish(DistinguishArgs),
    /// Doubling search for the number of traces a test needs.
    Complexity(ComplexityArgs),
    /// Check an identity or rerun an audit.
    Verify(VerifyArgs),
    /// Power-sum signatures and a minimal distinguishing word.
    Deck(DeckArgs),
    /// Root multiplicity at 1 of +-1 polynomials.
    PolyMult(PolyMultArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    /// Padded pair index.
    #[arg(long, conflicts_with_all = ["x", "y"])]
    pub k: Option<usize>,
    /// First source string.
    #[arg(long, requires = "y")]
    pub x: Option<BitString>,
    /// Second source string.
    #[arg(long, requires = "x")]
    pub y: Option<BitString>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenPairArgs {
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Padded pair index; the source is the member chosen by --variant.
    #[arg(long, conflicts_with = "x")]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Side::X)]
    pub variant: Side,
    /// Explicit source string.
    #[arg(long)]
    pub x: Option<BitString>,
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    #[arg(long, default_value_t = 10)]
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMethod {
    Exact,
    Mc,
}

#[derive(Debug, Args, Serialize)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    #[arg(long, value_enum, default_value_t = DistanceMethod::Exact)]
    pub method: DistanceMethod,
    /// Monte Carlo traces.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// E-set radius override (padded pairs only).
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SurrogateArgs {
    #[arg(long)]
    pub k: usize,
    /// Restrict to the E-set profiles.
    #[arg(long)]
    pub windowed: bool,
    #[arg(long, value_enum, default_value_t = AvoidArg::Corrected)]
    pub avoid_term: AvoidArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AvoidArg {
    Corrected,
    AsPrinted,
}

impl From<AvoidArg> for AvoidTerm {
    fn from(a: AvoidArg) -> Self {
        match a {
            AvoidArg::Corrected => AvoidTerm::Corrected,
            AvoidArg::AsPrinted => AvoidTerm::AsPrinted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingArg {
    Exact,
    Mc,
}

#[derive(Debug, Args, Serialize)]
pub struct ScalingArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub k_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ScalingArg::Exact)]
    pub method: ScalingArg,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMethod {
    Lrt,
    Mean,
}

#[derive(Debug, Args, Serialize)]
pub struct DistinguishArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Trace counts per experiment.
    #[arg(long = "traces", value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
    pub traces: Vec<u64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = TestMethod::Lrt)]
    pub method: TestMethod,
    /// Longest word searched by the mean test.
    #[arg(long, default_value_t = 8)]
    pub max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ComplexityArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Target error probability.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 500)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyTarget {
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma5,
    Lemma6,
    Lemma7,
    Vandermonde,
    ClosedForm,
    Pairsum,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub target: VerifyTarget,
    /// Size limit of the check; each target has its own default.
    #[arg(long)]
    pub max: Option<usize>,
    /// Random cases for closed-form checks.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Sweep values of k for the `lemma5`, `lemma6` and `lemma7` audits.
    #[arg(long, value_delimiter = ',')]
    pub k_list: Option<Vec<u64>>,
    /// TOML or JSON grid for the `lemma2` audit.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Baseline file for audits; defaults to the committed one.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DeckArgs {
    #[arg(long)]
    pub x: BitString,
    #[arg(long)]
    pub y: Option<BitString>,
    /// Highest power-sum order.
    #[arg(long, default_value_t = 4)]
    pub max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PolyMultArgs {
    /// Largest degree of the exhaustive table.
    #[arg(long, default_value_t = 17)]
    pub max: usize,
    /// Signs from degree 0 upward, e.g. "+--+"; reports this polynomial only.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
}
