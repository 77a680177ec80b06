use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dmdscan", version, about = "DMD-slit pushbroom hyperspectral imager simulator")]
pub struct Cli {
    /// Seed for texture, sensor noise and jitter [default: the scene file's seed for synth, else 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output path; a file or a directory depending on the command [default: per command]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Text file of key=value lines overriding option defaults; keys are long option names
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a scene description into a cube file [out: scene.cube]
    Synth(SynthArgs),
    /// Simulate a scan of a cube and write the acquisition directory [out: acquisition]
    Acquire(AcquireArgs),
    /// Rebuild a cube from an acquisition directory [out: reconstruction]
    Reconstruct(ReconstructArgs),
    /// Band-sweep NRMSD of a reconstruction against ground truth [out: sweep.csv]
    Evaluate(EvaluateArgs),
    /// Segment the RGB preview of a cube and write an ROI scan plan [out: roi]
    PlanRoi(PlanRoiArgs),
    /// Mean block spectrum of every segmented region [out: spectra]
    Spectra(SpectraArgs),
    /// Print the pattern count and estimated scan time
    Timing(TimingCmdArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Demo {
    ThreeLeaf,
    RoiField,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["spec", "demo"]))]
pub struct SynthArgs {
    /// Scene description file
    pub spec: Option<PathBuf>,

    /// Use a built-in scene instead of a file
    #[arg(long, value_enum)]
    pub demo: Option<Demo>,
}

#[derive(Debug, Clone, Args)]
pub struct TimingArgs {
    /// Slit width in scene columns
    #[arg(long, default_value_t = 1)]
    pub slit_width: usize,

    /// Sensor frame rate
    #[arg(long, default_value_t = 25.0)]
    pub fps: f64,

    /// Sensor exposure per frame
    #[arg(long, default_value_t = 10.0)]
    pub exposure_ms: f64,

    /// Fixed overhead added to every pattern
    #[arg(long, default_value_t = 0.0)]
    pub overhead_ms: f64,

    /// Fastest DMD pattern rate
    #[arg(long, default_value_t = 9523.0)]
    pub dmd_hz: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReadoutKind {
    /// Quantising sensor with shot and read noise
    Sensor,
    /// Exact floating-point samples
    Float,
}

#[derive(Debug, Clone, Args)]
pub struct SensorArgs {
    #[arg(long, value_enum, default_value = "sensor")]
    pub readout: ReadoutKind,

    #[arg(long, default_value_t = 8)]
    pub bit_depth: u8,

    /// Read noise in electrons
    #[arg(long, default_value_t = 5.0)]
    pub read_noise: f64,

    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub shot_noise: bool,

    /// Full-well capacity in electrons
    #[arg(long, default_value_t = 10_000.0)]
    pub full_well: f64,

    /// Set the gain so the scene reaches this overall SNR [default: none, radiance 1.0 per column is full scale]
    #[arg(long)]
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct JitterArgs {
    /// none, walk, sine or uniform
    #[arg(long, default_value = "none")]
    pub jitter: String,

    /// Bound on the offset along each axis, in pixels
    #[arg(long, default_value_t = 0.0)]
    pub jitter_amplitude: f64,

    /// Step standard deviation of the random walk
    #[arg(long, default_value_t = 1.0)]
    pub jitter_step: f64,

    /// Period of the sinusoid, in frames
    #[arg(long, default_value_t = 50.0)]
    pub jitter_period: f64,

    /// Allow fractional offsets
    #[arg(long, default_value_t = false, action = ArgAction::Set)]
    pub jitter_subpixel: bool,
}

#[derive(Debug, Args)]
pub struct AcquireArgs {
    /// Ground-truth cube file
    pub cube: PathBuf,

    /// ROI plan file from plan-roi; overrides the slit width [default: full scan]
    #[arg(long)]
    pub plan: Option<PathBuf>,

    #[command(flatten)]
    pub timing: TimingArgs,

    #[command(flatten)]
    pub sensor: SensorArgs,

    #[command(flatten)]
    pub jitter: JitterArgs,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Acquisition directory
    pub record: PathBuf,

    /// Frame whose position defines the output coordinates
    #[arg(long, default_value_t = 0)]
    pub reference: usize,

    /// Registration search radius in pixels
    #[arg(long, default_value_t = 8)]
    pub search_radius: usize,

    /// Minimum relative depth of the dark stripe
    #[arg(long, default_value_t = 0.2)]
    pub stripe_threshold: f64,

    /// Interpolate columns no frame covered
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub fill_gaps: bool,

    /// Ground-truth cube; reports the NRMSD of the result [default: none]
    #[arg(long)]
    pub truth: Option<PathBuf>,

    /// Wavelengths in nm to export as PGM band images, comma separated [default: none]
    #[arg(long, value_delimiter = ',')]
    pub band_images: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth cube
    pub truth: PathBuf,

    /// Reconstructed cube
    pub recon: PathBuf,

    /// Band counts to rebin to, comma separated
    #[arg(long, value_delimiter = ',', default_value = "50,100,150,200,250,300")]
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    /// Low hysteresis threshold, relative to the strongest gradient
    #[arg(long, default_value_t = 0.1)]
    pub canny_low: f64,

    /// High hysteresis threshold, relative to the strongest gradient
    #[arg(long, default_value_t = 0.3)]
    pub canny_high: f64,

    /// Gaussian blur before the gradient
    #[arg(long, default_value_t = 1.4)]
    pub canny_sigma: f64,

    /// Smallest region kept, in pixels
    #[arg(long, default_value_t = 25)]
    pub min_area: usize,
}

#[derive(Debug, Args)]
pub struct PlanRoiArgs {
    /// Cube whose RGB rendering serves as the preview
    pub cube: PathBuf,

    /// Region labels to scan, comma separated [default: all]
    #[arg(long, value_delimiter = ',')]
    pub regions: Vec<u32>,

    /// Columns added on each side of a region
    #[arg(long, default_value_t = 0)]
    pub margin: usize,

    #[command(flatten)]
    pub segment: SegmentArgs,

    #[command(flatten)]
    pub timing: TimingArgs,
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    /// Cube to sample, usually a reconstruction
    pub cube: PathBuf,

    /// Cube to segment [default: the sampled cube]
    #[arg(long)]
    pub segment_from: Option<PathBuf>,

    /// Side of the square sampling block
    #[arg(long, default_value_t = 4)]
    pub block: usize,

    #[command(flatten)]
    pub segment: SegmentArgs,
}

#[derive(Debug, Args)]
pub struct TimingCmdArgs {
    /// Scene width in columns
    #[arg(long, default_value_t = 400)]
    pub columns: usize,

    /// ROI plan file; replaces the full scan [default: none]
    #[arg(long)]
    pub plan: Option<PathBuf>,

    #[command(flatten)]
    pub timing: TimingArgs,
}
