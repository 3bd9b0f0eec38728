mod alloc;
mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use edgebench::Method;

#[global_allocator]
static GLOBAL: alloc::CountingAlloc = alloc::CountingAlloc;

/// Benchmark edge detectors on PGM rasters and synthetic scenes.
#[derive(Parser, Debug)]
#[command(name = "edgebench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect edges in one image and write a 0/255 edge map.
    Detect(DetectArgs),
    /// Sweep thresholds and report the (min, ideal, max) triple.
    Sweep(SweepArgs),
    /// Score every band of a multi-band stack against a truth mask.
    Bands(BandsArgs),
    /// False-edge rate and recall under salt-and-pepper noise.
    Noise(NoiseArgs),
    /// Wall-clock and peak-memory scaling across image sizes.
    Bench(BenchArgs),
    /// Render a synthetic scene and its truth mask.
    Synth(SynthArgs),
}

/// Threshold and filter settings shared by the detecting subcommands.
#[derive(Args, Debug, Clone, Default)]
pub struct DetectorArgs {
    /// Threshold for single-threshold methods; for canny, the high
    /// threshold with low = 0.4 * high.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Canny low threshold.
    #[arg(long)]
    pub low: Option<f64>,
    /// Canny high threshold.
    #[arg(long)]
    pub high: Option<f64>,
    /// Gaussian sigma for canny, log and zerocross.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Second-derivative kernel for zerocross: whitespace- or
    /// comma-separated rows, `#` starts a comment.
    #[arg(long)]
    pub kernel: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub method: Method,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub method: Method,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub kernel: Option<PathBuf>,
    /// Number of evenly spaced thresholds on [0, 1].
    #[arg(long, default_value_t = edgebench::sweep::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Density at or below which edges count as eliminated.
    #[arg(long, default_value_t = edgebench::sweep::DEFAULT_ELIMINATION_EPS)]
    pub eps: f64,
    /// Fraction of the lowest-threshold density that still counts as the
    /// saturated plateau.
    #[arg(long, default_value_t = edgebench::sweep::DEFAULT_PLATEAU_FRAC)]
    pub plateau: f64,
    /// Report this ideal threshold instead of the computed one.
    #[arg(long)]
    pub ideal: Option<f64>,
    /// Text for the distinguished-features column.
    #[arg(long, default_value = "-")]
    pub features: String,
    /// CSV of the density curve.
    #[arg(long)]
    pub out: PathBuf,
    /// Markdown table; printed to stdout when absent.
    #[arg(long)]
    pub markdown: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BandsArgs {
    /// Band manifest: one `label<TAB>path` line per band.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub method: Method,
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// Truth mask PGM (pixels >= 0.5 are truth).
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value = "truth")]
    pub feature: String,
    /// Chebyshev matching tolerance in pixels.
    #[arg(long, default_value_t = 1)]
    pub tol: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tuning {
    /// Sweep every corrupted image and use its ideal threshold.
    PerImage,
    /// Sweep the clean scene once per method.
    Clean,
    /// Use --threshold for every method.
    Fixed,
}

impl Tuning {
    pub fn name(self) -> &'static str {
        match self {
            Tuning::PerImage => "per-image",
            Tuning::Clean => "clean",
            Tuning::Fixed => "fixed",
        }
    }
}

#[derive(Args, Debug)]
pub struct NoiseArgs {
    #[arg(long, value_delimiter = ',', default_value = "sobel,canny")]
    pub methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.05,0.1")]
    pub densities: Vec<f64>,
    /// Seed list (`1,2,3`) or half-open range (`0..20`).
    #[arg(long, default_value = "0..20")]
    pub seeds: String,
    #[arg(long, default_value_t = 1)]
    pub tol: usize,
    #[arg(long, value_enum, default_value_t = Tuning::PerImage)]
    pub tuning: Tuning,
    /// Threshold for `--tuning fixed`.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Scene PGM; defaults to a 64x64 vertical step (0.25 | 0.75).
    #[arg(long, requires = "truth")]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub markdown: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "sobel,canny,roberts,prewitt,log,zerocross"
    )]
    pub methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024")]
    pub sides: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Threshold used by every timed detector.
    #[arg(long, default_value_t = 0.2)]
    pub threshold: f64,
    /// Noise densities for the sensitivity columns.
    #[arg(long, value_delimiter = ',', default_value = "0,0.05")]
    pub noise_densities: Vec<f64>,
    /// Leave the noise columns empty.
    #[arg(long)]
    pub skip_noise: bool,
    #[arg(long, default_value = "0..20")]
    pub noise_seeds: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub markdown: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Vstep,
    Ribbon,
    Disk,
    Checker,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Side length of a square scene.
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// vstep: first foreground column (default width / 2).
    #[arg(long)]
    pub split: Option<usize>,
    /// ribbon: strip width in pixels (default min side / 8).
    #[arg(long)]
    pub strip: Option<f64>,
    /// ribbon: angle from the horizontal in degrees.
    #[arg(long, default_value_t = 0.0)]
    pub angle: f64,
    /// ribbon: shift along the strip normal in pixels.
    #[arg(long, default_value_t = 0.0)]
    pub offset: f64,
    /// disk: center as `x,y` (default image center).
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub center: Option<Vec<f64>>,
    /// disk: radius (default min side / 4).
    #[arg(long)]
    pub radius: Option<f64>,
    /// checker: block size (default min side / 8).
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub lo: f64,
    #[arg(long, default_value_t = 0.8)]
    pub hi: f64,
    /// Standard deviation of added Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scene PGM; the truth mask goes to `<stem>_truth.pgm` beside it.
    #[arg(long)]
    pub out: PathBuf,
}

/// Why a run failed: bad flags (exit 2) or a library error (exit 2 for
/// parameter errors, 1 otherwise).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(edgebench::Error),
}

impl From<edgebench::Error> for Failure {
    fn from(e: edgebench::Error) -> Self {
        Failure::Run(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Run(e) if e.is_config_error() => 2,
            Failure::Run(_) => 1,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|source| {
        Failure::Run(edgebench::Error::IoFailure {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("EDGEBENCH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        usage(format!(
            "EDGEBENCH_THREADS must be a non-negative integer, got {raw:?}"
        ))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Detect(a) => commands::detect(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Bands(a) => commands::bands(a),
        Command::Noise(a) => commands::noise(a),
        Command::Bench(a) => commands::bench(a),
        Command::Synth(a) => commands::synth(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => {
                    eprintln!("error: {msg}\n\nFor more information, try '--help'.")
                }
                Failure::Run(e) => eprintln!("error: {}: {e}", e.name()),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
