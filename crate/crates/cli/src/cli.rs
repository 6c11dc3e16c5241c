use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "mono3d-kit", version, about = "Lift 2D detections to 3D boxes and score 3D detections")]
pub struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "MONO3D_KIT_THREADS")]
    pub jobs: Option<usize>,
    /// Suppress progress output.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lift 2D detections (mask + depth) to cuboids.
    Lift(LiftArgs),
    /// Score a prediction set against a dataset manifest.
    Eval(EvalArgs),
    /// Convert an Omni3D-layout JSON file to a dataset manifest.
    #[command(name = "convert-omni3d")]
    ConvertOmni3d(ConvertArgs),
    /// Run the built-in oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
pub struct LiftArgs {
    /// Dataset manifest providing image sizes and intrinsics.
    #[arg(long)]
    pub manifest: PathBuf,
    /// 2D detections JSON (image_id, category, score, box2d, mask, optional depth).
    #[arg(long)]
    pub detections: PathBuf,
    /// Directory holding `OVD1` depth files; default name `<image_id>.ovd`.
    #[arg(long)]
    pub depth_dir: PathBuf,
    /// Directory holding PGM masks named by each detection's `mask` field.
    #[arg(long)]
    pub mask_dir: PathBuf,
    /// Output prediction set.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Intrinsics JSON applied to every image instead of the manifest's.
    #[arg(long)]
    pub intrinsics: Option<PathBuf>,
    /// DBSCAN radius in meters (default 0.05).
    #[arg(long, conflicts_with = "adaptive_eps")]
    pub eps: Option<f64>,
    /// Set the DBSCAN radius to twice the median nearest-neighbour distance.
    #[arg(long)]
    pub adaptive_eps: bool,
    /// DBSCAN core-point threshold (neighbours including the point).
    #[arg(long, default_value_t = 10)]
    pub min_pts: usize,
    /// Smallest kept cluster that is fitted.
    #[arg(long, default_value_t = 10)]
    pub min_points: usize,
    /// Clouds above this size are strided down before clustering.
    #[arg(long, default_value_t = 20_000)]
    pub max_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Original,
    TargetAware,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// Dataset manifest holding the ground truth.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Prediction set to score.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Directory receiving `report.json` and `report.csv`.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// `target-aware` drops detections of categories absent from their image.
    #[arg(long, value_enum, default_value_t = Protocol::TargetAware)]
    pub protocol: Protocol,
    /// Comma-separated 3D IoU thresholds (default 0.05 to 0.50 step 0.05).
    #[arg(long, value_delimiter = ',')]
    pub iou_thresholds: Option<Vec<f64>>,
    /// Comma-separated 2D IoU thresholds (default 0.50 to 0.95 step 0.05).
    #[arg(long, value_delimiter = ',')]
    pub iou2d_thresholds: Option<Vec<f64>>,
    /// Minimum 2D IoU for a detection to enter the NHD averages.
    #[arg(long, default_value_t = 0.5)]
    pub nhd_gate: f64,
    /// Comma-separated categories forming the easy subset.
    #[arg(long, value_delimiter = ',')]
    pub easy: Vec<String>,
    /// Comma-separated categories forming the hard subset.
    #[arg(long, value_delimiter = ',')]
    pub hard: Vec<String>,
    /// Recall levels sampled for interpolated AP.
    #[arg(long, default_value_t = 101)]
    pub recall_points: usize,
    /// Embed the generation time in the report.
    #[arg(long)]
    pub stamp: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Map every IoU v to 0.9·v + 0.05.
    Iou,
    /// Offset every assignment cost by 0.5.
    Hungarian,
}

#[derive(Args, Debug, Clone)]
pub struct SelftestArgs {
    /// Seed for every suite's random stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random oriented pairs for the Monte Carlo IoU check.
    #[arg(long, default_value_t = 20)]
    pub pairs: usize,
    /// Monte Carlo samples per pair.
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    /// Deliberately corrupt a metric to exercise the failure path.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}
