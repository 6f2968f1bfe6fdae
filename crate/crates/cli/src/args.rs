use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gradflow::density::DEFAULT_SMOOTHING_STEPS;
use gradflow::evaluation::DEFAULT_MIXED_THRESHOLD_PCT;
use gradflow::flow::FlowDirection;
use gradflow::kmeans::{DEFAULT_CLUSTERS, DEFAULT_MAX_ITER};
use gradflow::knn::DEFAULT_NEIGHBORS;

#[derive(Parser, Debug)]
#[command(name = "gradflow", version, about = "Gradient-flow clustering of spectral images")]
pub struct Cli {
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cluster by density flow on the k-nearest-neighbor graph.
    Cluster(ClusterArgs),
    /// Cluster with seeded k-means (Lloyd iterations).
    Kmeans(KmeansArgs),
    /// Write a synthetic data set with its ground-truth mask.
    Synth(SynthArgs),
    /// Score saved labels against a ground-truth mask.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// `.hdr` means ENVI, anything else CSV.
    Auto,
    Csv,
    Envi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Max,
    Min,
}

impl From<Direction> for FlowDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Max => FlowDirection::Max,
            Direction::Min => FlowDirection::Min,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// CSV matrix (one pixel per row) or ENVI header.
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,

    /// Image lines; with --cols, lets CSV input produce a class map.
    #[arg(long, requires = "cols", value_parser = clap::value_parser!(u64).range(1..))]
    pub rows: Option<u64>,

    #[arg(long, requires = "rows", value_parser = clap::value_parser!(u64).range(1..))]
    pub cols: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Ground-truth mask; enables the report tables.
    #[arg(long)]
    pub mask: Option<PathBuf>,

    /// Percentage of another class above which a primary cluster is mixed.
    #[arg(long, default_value_t = DEFAULT_MIXED_THRESHOLD_PCT)]
    pub mixed_threshold: f64,

    /// Also report accuracy under one-to-one class/cluster matching.
    #[arg(long)]
    pub matched: bool,

    /// Worker threads; defaults to the available cores. Results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(short = 'k', long, default_value_t = DEFAULT_NEIGHBORS)]
    pub neighbors: usize,

    #[arg(long, default_value_t = DEFAULT_SMOOTHING_STEPS)]
    pub smoothing_steps: usize,

    #[arg(long, value_enum, default_value_t = Direction::Max)]
    pub flow_direction: Direction,

    /// Average each point's own density with its neighbors' when smoothing.
    #[arg(long)]
    pub include_self: bool,

    /// Keep neighbor graphs here, keyed by input digest and k.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,

    /// Skip the per-point density.csv and flow.csv dumps.
    #[arg(long)]
    pub no_diagnostics: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct KmeansArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(short = 'k', long, default_value_t = DEFAULT_CLUSTERS)]
    pub clusters: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// Isotropic Gaussian blobs.
    Blobs,
    /// Image cube of noisy material mixtures over Voronoi patches.
    Mixture,
}

#[derive(Args, Debug, Clone)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKind::Blobs)]
    pub kind: SynthKind,

    /// Blob as `x,y,...:stdev:count`; repeat for more. Default: three 2-D blobs.
    #[arg(long = "blob", value_name = "SPEC")]
    pub blobs: Vec<String>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value = "synth")]
    pub out: PathBuf,

    /// Mixture cube lines.
    #[arg(long, default_value_t = 60)]
    pub rows: usize,

    #[arg(long, default_value_t = 60)]
    pub cols: usize,

    #[arg(long, default_value_t = 32)]
    pub bands: usize,

    #[arg(long, default_value_t = 6)]
    pub materials: usize,

    /// Noise standard deviation of the mixture cube.
    #[arg(long, default_value_t = 1e-3)]
    pub noise: f64,

    /// Also write the data as a little-endian float32 BSQ cube (mixture only).
    #[arg(long)]
    pub envi: bool,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// Cluster labels, one integer per line.
    #[arg(long)]
    pub labels: PathBuf,

    #[arg(long)]
    pub mask: PathBuf,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    #[arg(long, default_value_t = DEFAULT_MIXED_THRESHOLD_PCT)]
    pub mixed_threshold: f64,

    #[arg(long)]
    pub matched: bool,
}
