use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use translator_core::BarrierName;

#[derive(Debug, Parser)]
#[command(name = "translator", version, about = "Rotationally symmetric translators of concave curvature flows")]
pub struct Cli {
    /// JSON document whose keys mirror flag names; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a profile from the axis and write CSV plus a JSON sidecar.
    Solve(SolveArgs),
    /// Check a profile (or the cylinder example) and write a JSON report.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Run the sampled property suite of a speed.
    Props(PropsArgs),
    /// Tabulate a barrier and its defect against the profile equation.
    Barriers(BarriersArgs),
    /// Run the clamped Picard iteration of the harmonic-pairs equation.
    Picard(PicardArgs),
    /// Render a profile CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpeedName {
    SigmaK,
    Harmonic,
    Quotient,
    Product,
}

#[derive(Debug, Clone, Args)]
pub struct SpeedArgs {
    #[arg(long, value_enum)]
    pub speed: SpeedName,
    /// Number of principal curvatures.
    #[arg(long)]
    pub n: usize,
    /// Order of sigma-k, or numerator order of a quotient.
    #[arg(long)]
    pub k: Option<usize>,
    /// Denominator order of a quotient.
    #[arg(long)]
    pub l: Option<usize>,
    /// Product factors, e.g. `sigma-k:2,harmonic,quotient:3:1`.
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<String>,
    /// Product weights, summing to 1.
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub speed: SpeedArgs,
    /// Right end of the integration interval.
    #[arg(long, default_value_t = 3.0)]
    pub rmax: f64,
    /// Radius at which the integration starts.
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub atol: f64,
    /// Slope above which the profile is declared to blow up.
    #[arg(long, default_value_t = 1e8)]
    pub blowup: f64,
    #[arg(long, default_value = "profile.csv")]
    pub out: PathBuf,
    /// Solve for a range of one parameter, e.g. `n=3..6`; files get a `-n3` style suffix.
    #[arg(long)]
    pub sweep: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Translator residual `gamma(lambda) - <nu, e_{n+1}>`.
    Soliton(VerifySolitonArgs),
    /// `lambda_1 >= H - alpha gamma` on the samples satisfying the hypotheses.
    Convexity(VerifyConvexityArgs),
    /// Sub- and super-solution orderings.
    Barriers(VerifyProfileArgs),
    /// Sign conditions and residual of the surface-of-revolution example.
    Cylinder(VerifyCylinderArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VerifyProfileArgs {
    /// Profile CSV; its metadata is read from the `.json` file next to it.
    #[arg(long)]
    pub profile: PathBuf,
    /// Report path; printed to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifySolitonArgs {
    #[command(flatten)]
    pub common: VerifyProfileArgs,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyConvexityArgs {
    #[command(flatten)]
    pub common: VerifyProfileArgs,
    /// A number, or `auto` for 1.05 times the sampled sup of (delta+1)H/gamma.
    #[arg(long, default_value = "auto")]
    pub alpha: String,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// A number, or `auto` for 0.9 times the sampled inf of (min pair sum)/H.
    #[arg(long, default_value = "auto")]
    pub beta: String,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyCylinderArgs {
    /// Heights to test; defaults to 100 evenly spaced values in [zmin, zmax].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z: Vec<f64>,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub zmin: f64,
    #[arg(long, default_value_t = 5.0)]
    pub zmax: f64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PropsArgs {
    #[command(flatten)]
    pub speed: SpeedArgs,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BarriersArgs {
    #[arg(long, value_parser = clap::value_parser!(BarrierName))]
    pub name: BarrierName,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    /// Parameter of w5; defaults to sqrt((n^2+n+2)/8).
    #[arg(long)]
    pub a: Option<f64>,
    /// Right end of the table; clipped to the barrier's domain.
    #[arg(long, default_value_t = 1.0)]
    pub rmax: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value = "barrier.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PicardArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Grid length; defaults to 0.65 * 12/(n^2+5n+2).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Number of grid nodes.
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Iteration log.
    #[arg(long, default_value = "picard.json")]
    pub out: PathBuf,
    /// Fixed-point CSV; defaults to the log path with a `.csv` extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "plot.svg")]
    pub out: PathBuf,
    /// Barriers to overlay on the slope plot, e.g. `w3,w5`.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(BarrierName), conflicts_with = "revolve")]
    pub barriers: Vec<BarrierName>,
    /// Draw the silhouette of the surface of revolution instead of the slope.
    #[arg(long)]
    pub revolve: bool,
    #[arg(long)]
    pub title: Option<String>,
}
