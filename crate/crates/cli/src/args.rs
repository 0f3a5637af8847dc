use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wavelet_prep::dwt::{ScalingConvention, TransformMode};
use wavelet_prep::pipeline::{parse_dims, ChannelMask, ColorPolicy, Normalization};

#[derive(Debug, Parser)]
#[command(name = "wavelet-prep", version, about = "LeGall 5/3 wavelet preprocessing for CNN inputs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Preprocess every image in a directory into .wvt tensor containers.
    Pipeline(PipelineArgs),
    /// Check that the transform round-trips each image.
    Verify(VerifyArgs),
    /// Per-subband coefficient statistics.
    Stats(StatsArgs),
    /// Throughput of resize, forward transform and the full pipeline on synthetic noise.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    Float,
    Reversible,
    All,
}

impl BenchMode {
    pub fn modes(self) -> Vec<TransformMode> {
        match self {
            BenchMode::Float => vec![TransformMode::Float],
            BenchMode::Reversible => vec![TransformMode::Reversible],
            BenchMode::All => vec![TransformMode::Float, TransformMode::Reversible],
        }
    }
}

pub fn dims(s: &str) -> Result<(usize, usize), String> {
    parse_dims(s)
}

/// Settings shared by every subcommand that builds a pipeline.
#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Number of decomposition levels.
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    /// Color handling: gray (luma) or fanout (every channel).
    #[arg(long, default_value = "gray")]
    pub color: ColorPolicy,
    /// Tap scaling: paper or jpeg2000.
    #[arg(long, default_value = "paper")]
    pub convention: ScalingConvention,
}

#[derive(Debug, Args)]
pub struct Jobs {
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "WAVELET_PREP_JOBS", default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Network input size W x H; the transform runs at 2W x 2H.
    #[arg(long, value_parser = dims)]
    pub size: (usize, usize),
    #[arg(long, default_value = "float")]
    pub mode: TransformMode,
    /// Comma-separated subbands to keep.
    #[arg(long, default_value = "LL,HL,LH,HH")]
    pub channels: ChannelMask,
    /// raw, unit or affine.
    #[arg(long, default_value = "raw")]
    pub normalize: Normalization,
    #[command(flatten)]
    pub transform: TransformArgs,
    #[command(flatten)]
    pub jobs: Jobs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "reversible")]
    pub mode: TransformMode,
    /// Network input size; defaults to half of each image's size.
    #[arg(long, value_parser = dims)]
    pub size: Option<(usize, usize)>,
    /// Float-mode bound on the [0, 1] sample scale.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Check the containers written here (as <stem>.wvt) instead of
    /// transforming afresh. Settings are read from the container.
    #[arg(long)]
    pub containers: Option<PathBuf>,
    #[command(flatten)]
    pub transform: TransformArgs,
    #[command(flatten)]
    pub jobs: Jobs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Network input size; defaults to half of each image's size.
    #[arg(long, value_parser = dims)]
    pub size: Option<(usize, usize)>,
    #[arg(long, default_value = "float")]
    pub mode: TransformMode,
    #[command(flatten)]
    pub transform: TransformArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Network input size W x H.
    #[arg(long, value_parser = dims)]
    pub size: (usize, usize),
    /// Size of the synthetic source image.
    #[arg(long, value_parser = dims, default_value = "1024x1024")]
    pub source: (usize, usize),
    #[arg(long, value_enum, default_value = "all")]
    pub mode: BenchMode,
    /// Timed samples per stage.
    #[arg(long, default_value_t = 5)]
    pub iterations: usize,
    /// Untimed runs before sampling.
    #[arg(long, default_value_t = 1)]
    pub warmup: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub jobs: Jobs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
}
