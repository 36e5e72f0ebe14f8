use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "chhard",
    version,
    about = "Channel hardening synthesis and analysis"
)]
pub struct Cli {
    /// Root seed; mandatory for `synth`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving every artifact and the manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Format of tabular artifacts.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form std_db surface over antenna and path counts.
    Theory(TheoryArgs),
    /// Generate a channel tensor file.
    Synth(SynthArgs),
    /// Hardening curve and related statistics of a tensor file.
    Analyze(AnalyzeArgs),
    /// Run a complete figure pipeline.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Largest antenna count; rows are m = 1..=m-max.
    #[arg(long, default_value_t = 128)]
    pub m_max: u64,
    /// Comma-separated path counts; `inf` for the rich-scattering limit.
    #[arg(long, value_delimiter = ',', default_value = "1,3,10,30,100,inf")]
    pub paths: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Gaussian,
    Keyhole,
    Scatterer,
    Gscm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    Omni,
    Directive,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// GSCM configuration file (TOML); the built-in indoor preset otherwise.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Users (K).
    #[arg(long = "users", visible_alias = "K")]
    pub users: Option<usize>,
    /// Snapshots (N).
    #[arg(long = "snapshots", visible_alias = "N")]
    pub snapshots: Option<usize>,
    /// Frequency points (F).
    #[arg(long = "freqs", visible_alias = "F")]
    pub freqs: Option<usize>,
    /// Antennas (M) for the gaussian and keyhole models.
    #[arg(long = "antennas", visible_alias = "M")]
    pub antennas: Option<usize>,
    /// Path count for the scatterer model.
    #[arg(long, default_value_t = 10)]
    pub paths: usize,
    /// Array id: cylindrical-128, planar-100 or linear-<n>.
    #[arg(long, default_value = "cylindrical-128")]
    pub array: String,
    /// User antenna pattern for the gscm model.
    #[arg(long, value_enum, default_value_t = PatternArg::Omni)]
    pub pattern: PatternArg,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "tensor.mcht")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Curve,
    Cdf,
    Map,
    Spread,
    Polstats,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub tensor: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub user: usize,
    /// Selection order, e.g. original, strongest_first, both_alternating.
    #[arg(long, default_value = "strongest_first")]
    pub order: String,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "curve")]
    pub outputs: Vec<Output>,
    /// Array id overriding the one stored in the tensor metadata.
    #[arg(long)]
    pub array: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig5,
    Fig7,
    Fig8,
    Fig14,
    Fig15,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Independent runs for the ensemble figures.
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    /// GSCM configuration file (TOML); the built-in indoor preset otherwise.
    #[arg(long)]
    pub config: Option<PathBuf>,
}
