use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "hammock",
    version,
    about = "Hammock-jump analysis of rating graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Load a rating file and export it as sorted generic TSV.
    Ingest(IngestArgs),
    /// Connectivity and small-world statistics of one induced social network.
    Stats(StatsArgs),
    /// Export the social network induced by a jump, with its triads and bridges.
    Induce(InduceArgs),
    /// Per-width connectivity, reachability, L and C.
    SweepWidth(SweepWidthArgs),
    /// Watts-Strogatz rewiring sweep with the derived risk curve.
    SweepP(SweepPArgs),
    /// Scaled path length and risk as the hammock width decreases.
    RiskWidth(RiskWidthArgs),
    /// Benefit cells reachable by a new person adding ratings one at a time.
    BenefitExperiment(BenefitArgs),
    /// Leave-one-out rating prediction errors.
    PredictLoo(LooArgs),
    /// Synthetic graphs.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Args, Debug, Serialize)]
pub struct RunArgs {
    /// Directory receiving the outputs and run.json.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    /// Four columns means MovieLens, three means generic TSV.
    Auto,
    Movielens,
    Tsv,
}

#[derive(Args, Debug, Serialize)]
pub struct InputArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    pub format: FormatArg,
    /// The generic TSV input starts with a header line.
    #[arg(long)]
    pub header: bool,
    /// Rating scale as `min..max`.
    #[arg(long, default_value = "1..5")]
    pub scale: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReachScopeArg {
    Largest,
    PerSource,
}

#[derive(Args, Debug, Serialize)]
pub struct ReachArgs {
    #[arg(long, value_enum, default_value_t = ReachScopeArg::Largest)]
    pub reach_scope: ReachScopeArg,
    /// Raters an artifact needs inside a component to count as reachable.
    #[arg(long, default_value_t = 2)]
    pub min_raters: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthModeArg {
    Connected,
    Largest,
    Harmonic,
}

#[derive(Args, Debug, Serialize)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// MovieLens `u.item` file for titles in artifacts.csv.
    #[arg(long)]
    pub items: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Hammock width, or `skip`.
    #[arg(long, default_value = "1")]
    pub w: String,
    #[command(flatten)]
    pub reach: ReachArgs,
    #[arg(long, value_enum, default_value_t = LengthModeArg::Connected)]
    pub length_mode: LengthModeArg,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct InduceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Hammock width, or `skip`.
    #[arg(long, default_value = "1")]
    pub w: String,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepWidthArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Widths as `lo..hi[..step]`.
    #[arg(long, default_value = "1..120")]
    pub w: String,
    #[command(flatten)]
    pub reach: ReachArgs,
    #[arg(long, value_enum, default_value_t = LengthModeArg::Connected)]
    pub length_mode: LengthModeArg,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepPArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// `log:lo..hi..count` or a comma-separated list.
    #[arg(long, default_value = "log:1e-4..1..13")]
    pub p: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct RiskWidthArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Widths as `lo..hi[..step]`; swept from the largest down.
    #[arg(long, default_value = "1..16")]
    pub w: String,
    #[arg(long, default_value_t = 8)]
    pub baseline: u32,
    #[arg(long, value_enum, default_value_t = LengthModeArg::Harmonic)]
    pub length_mode: LengthModeArg,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct BenefitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Target artifact IDs, comma separated.
    #[arg(long, default_value = "50,751,395,1682")]
    pub targets: String,
    /// Target titles separated by `;`, resolved through `--items` instead of `--targets`.
    #[arg(long, requires = "items")]
    pub titles: Option<String>,
    #[arg(long)]
    pub items: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    pub max_ratings: usize,
    #[arg(long, default_value_t = 20)]
    pub repetitions: usize,
    #[arg(long, default_value = "1..32")]
    pub widths: String,
    #[arg(long, default_value_t = 1.0)]
    pub bin_width: f64,
    /// Let the new person rate the targets themselves.
    #[arg(long)]
    pub include_targets: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LooModeArg {
    Width,
    Path,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureArg {
    Common,
    Agreement,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionArg {
    Nearest,
    EveryLength,
}

#[derive(Args, Debug, Serialize)]
pub struct LooArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = LooModeArg::Width)]
    pub mode: LooModeArg,
    /// Minimum width of the network walked in path mode.
    #[arg(long, default_value_t = 113)]
    pub min_width: u32,
    #[arg(long, value_enum, default_value_t = MeasureArg::Common)]
    pub measure: MeasureArg,
    #[arg(long, value_enum, default_value_t = SelectionArg::EveryLength)]
    pub selection: SelectionArg,
    /// Masked ratings drawn with the seed.
    #[arg(long, default_value_t = 10_000, conflicts_with = "all")]
    pub sample: usize,
    /// Mask every rating instead of a sample.
    #[arg(long)]
    pub all: bool,
    /// Width bins of the summary (width mode).
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerateCommand {
    /// Watts-Strogatz wreath, rewired with probability p.
    Ws(WsArgs),
    /// Power-law rating communities joined by bridge people.
    ThreeCommunity(ThreeCommunityArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct WsArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value = "ws.tsv")]
    pub out: String,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValuesArg {
    Midpoint,
    Uniform,
}

#[derive(Args, Debug, Serialize)]
pub struct ThreeCommunityArgs {
    /// `auto` calibrates the exponent from the sizes.
    #[arg(long, default_value = "auto")]
    pub epsilon: String,
    #[arg(long, default_value_t = 3)]
    pub communities: usize,
    #[arg(long, default_value_t = 200)]
    pub people: usize,
    #[arg(long, default_value_t = 75)]
    pub artifacts: usize,
    #[arg(long, default_value_t = 15)]
    pub min_ratings: usize,
    #[arg(long, default_value_t = 3)]
    pub bridges: usize,
    #[arg(long, default_value_t = 15)]
    pub bridge_budget: usize,
    #[arg(long, value_enum, default_value_t = ValuesArg::Midpoint)]
    pub values: ValuesArg,
    #[arg(long, default_value = "three_community.tsv")]
    pub out: String,
    #[command(flatten)]
    pub run: RunArgs,
}

impl Command {
    pub fn run_args(&self) -> &RunArgs {
        match self {
            Command::Ingest(a) => &a.run,
            Command::Stats(a) => &a.run,
            Command::Induce(a) => &a.run,
            Command::SweepWidth(a) => &a.run,
            Command::SweepP(a) => &a.run,
            Command::RiskWidth(a) => &a.run,
            Command::BenefitExperiment(a) => &a.run,
            Command::PredictLoo(a) => &a.run,
            Command::Generate(GenerateCommand::Ws(a)) => &a.run,
            Command::Generate(GenerateCommand::ThreeCommunity(a)) => &a.run,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Stats(_) => "stats",
            Command::Induce(_) => "induce",
            Command::SweepWidth(_) => "sweep-width",
            Command::SweepP(_) => "sweep-p",
            Command::RiskWidth(_) => "risk-width",
            Command::BenefitExperiment(_) => "benefit-experiment",
            Command::PredictLoo(_) => "predict-loo",
            Command::Generate(GenerateCommand::Ws(_)) => "generate ws",
            Command::Generate(GenerateCommand::ThreeCommunity(_)) => "generate three-community",
        }
    }
}
