//! Command-line and config-file parameters.
//!
//! Each subcommand has one parameter struct with optional fields. Flags
//! and the JSON config fill the same struct; `with_defaults` completes it.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "polarforge",
    version,
    about = "Polar and Reed-Muller code design, analysis and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an information set and write it as a design file.
    Construct(Common<ConstructArgs>),
    /// Report w_min, A_wmin, ΣP and UB for a design file.
    Analyze(Common<AnalyzeArgs>),
    /// Reliability designs over a grid of design parameters.
    Sweep(Common<SweepArgs>),
    /// Monte-Carlo block error rate of a design.
    Simulate(Common<SimulateArgs>),
    /// Compare the closed-form spectrum against brute-force enumeration.
    OracleCheck(Common<OracleArgs>),
    /// Differences between two designs of the same length and dimension.
    Compare(Common<CompareArgs>),
}

#[derive(Debug, Args)]
pub struct Common<T: Args> {
    /// JSON parameter object or a manifest from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub args: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Awgn,
    Bec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Reliability,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaKind {
    Exponential,
    /// Exponential fit with check-node outputs clipped at 100.
    Saturating,
    TwoSegment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieKind {
    Larger,
    Smaller,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PretransformKind {
    None,
    Crc,
    Pac,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderChoice {
    Sc,
    Scl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArithmeticKind {
    MinSum,
    Exact,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructArgs {
    /// Blocklength, a power of two.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub channel: Option<ChannelKind>,
    /// Design Eb/N0 in dB (AWGN).
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Erasure probability (BEC).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyKind>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Degree cap for the mixed design: `auto` or an integer.
    #[arg(long)]
    pub cap: Option<String>,
    #[arg(long, value_enum)]
    pub ga: Option<GaKind>,
    #[arg(long, value_enum)]
    pub tie: Option<TieKind>,
    /// Design file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl ConstructArgs {
    pub fn with_defaults(mut self) -> Self {
        self.channel.get_or_insert(ChannelKind::Awgn);
        self.strategy.get_or_insert(StrategyKind::Reliability);
        self.alpha
            .get_or_insert(polarforge::construction::DEFAULT_ALPHA);
        self.cap.get_or_insert_with(|| "auto".into());
        self.ga.get_or_insert(GaKind::Exponential);
        self.tie.get_or_insert(TieKind::Larger);
        self.output
            .get_or_insert_with(|| PathBuf::from("design.json"));
        self
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeArgs {
    /// Design file produced by `construct`.
    pub design: Option<PathBuf>,
    /// Evaluate on this channel instead of the design channel.
    #[arg(long, value_enum)]
    pub channel: Option<ChannelKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// CSV file to write; standard output otherwise.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON report with negligibility ratios.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub family: Option<ChannelKind>,
    /// Explicit ascending grid (BEC: ρ = −ln ε; AWGN: Eb/N0 in dB).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rho: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub ga: Option<GaKind>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl SweepArgs {
    pub fn with_defaults(mut self) -> Self {
        let family = *self.family.get_or_insert(ChannelKind::Bec);
        if self.rho.is_none() {
            let (lo, hi) = match family {
                ChannelKind::Bec => (std::f64::consts::LN_2, 1e6f64.ln()),
                ChannelKind::Awgn => (-2.0, 10.0),
            };
            self.rho_min.get_or_insert(lo);
            self.rho_max.get_or_insert(hi);
            self.points.get_or_insert(50);
        }
        self.ga.get_or_insert(GaKind::Exponential);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// Design file produced by `construct`.
    #[arg(long)]
    pub design: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub pretransform: Option<PretransformKind>,
    #[arg(long, value_enum)]
    pub decoder: Option<DecoderChoice>,
    /// List size (SCL only).
    #[arg(long)]
    pub list: Option<usize>,
    /// Comma-separated Eb/N0 points in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Option<Vec<f64>>,
    #[arg(long)]
    pub max_blocks: Option<u64>,
    #[arg(long)]
    pub target_errors: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub arithmetic: Option<ArithmeticKind>,
    /// Replace the channel by perfect LLRs.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub noiseless: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn with_defaults(mut self) -> Self {
        let sim = polarforge::simulator::SimConfig::default();
        self.pretransform.get_or_insert(PretransformKind::None);
        let decoder = *self.decoder.get_or_insert(DecoderChoice::Scl);
        if decoder == DecoderChoice::Scl {
            self.list.get_or_insert(8);
        }
        self.max_blocks.get_or_insert(sim.max_blocks);
        self.target_errors.get_or_insert(sim.target_errors);
        self.workers.get_or_insert(0);
        self.arithmetic.get_or_insert(ArithmeticKind::MinSum);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleArgs {
    /// Check every decreasing set for 1 ≤ m ≤ this value.
    #[arg(long)]
    pub exhaustive_m: Option<u32>,
    #[arg(long)]
    pub sampled_m: Option<u32>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Largest code (or dual) dimension enumerated.
    #[arg(long)]
    pub max_k: Option<usize>,
    /// Largest m for orbit enumeration.
    #[arg(long)]
    pub max_lta_m: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl OracleArgs {
    pub fn with_defaults(mut self) -> Self {
        let suite = polarforge::oracle::OracleSuite::default();
        self.exhaustive_m.get_or_insert(suite.exhaustive_m);
        self.sampled_m.get_or_insert(suite.sampled_m);
        self.samples.get_or_insert(suite.samples);
        self.max_k.get_or_insert(suite.budget.max_k);
        self.max_lta_m.get_or_insert(suite.budget.max_lta_m);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareArgs {
    pub a: Option<PathBuf>,
    pub b: Option<PathBuf>,
    /// Evaluate bounds on this channel instead of the first design's.
    #[arg(long, value_enum)]
    pub channel: Option<ChannelKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
