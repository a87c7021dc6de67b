//! Command-line pipeline: simulate, train, decompose, score, plot, and
//! reproduce the three study workflows end to end.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage error, 3 i/o error.

mod commands;
mod manifest;
mod repro;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use rfexplain::error::Error;

#[derive(Parser)]
#[command(
    name = "rfexplain",
    version,
    about = "Random forest interpretation toolkit"
)]
struct Cli {
    /// Worker threads; FF_THREADS is the fallback, default all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a simulated dataset with a known hidden structure.
    Simulate(SimulateArgs),
    /// Train a random forest and save it as a JSON model.
    Train(TrainArgs),
    /// Decompose predictions into per-feature contributions.
    Decompose(DecomposeArgs),
    /// Score how well plot contexts explain contributions.
    Gov(GovArgs),
    /// Render the plot suite.
    Plot(PlotArgs),
    /// Grid baselines: sensitivity analysis, partial dependence, ICE.
    Baseline(BaselineArgs),
    /// Reproduce a full study workflow with embedded checks.
    Repro(ReproArgs),
}

/// Dataset loading flags shared by every command that reads a CSV.
#[derive(Args, Clone)]
pub struct DataArgs {
    /// Input CSV file.
    #[arg(long)]
    pub data: PathBuf,
    /// Target column name.
    #[arg(long)]
    pub target: String,
    /// Columns forced to categorical (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Columns dropped at load (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub ignore: Vec<String>,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    /// The file has no header row; use --columns for names.
    #[arg(long)]
    pub no_header: bool,
    /// Column names for headerless files (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Target sample correlation between hidden structure and target.
    #[arg(long, default_value_t = 0.75)]
    pub rho: f64,
    #[arg(long, default_value = "toy4")]
    pub generator: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// regression | classification
    #[arg(long)]
    pub task: String,
    #[arg(long, default_value_t = 500)]
    pub ntree: usize,
    #[arg(long)]
    pub mtry: Option<usize>,
    #[arg(long)]
    pub sampsize: Option<usize>,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub replace: bool,
    /// Per-class draw counts, e.g. `yes:50,no:50`.
    #[arg(long)]
    pub stratify: Option<String>,
    #[arg(long)]
    pub min_node: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub max_cat_levels: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Out-of-bag cross validated variant (training set only).
    #[arg(long)]
    pub oob: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Additional long-format CSV export.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct GovArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Plain contributions instead of the OOB variant.
    #[arg(long)]
    pub plain: bool,
    /// Feature to score; omit for all main effects.
    #[arg(long)]
    pub feature: Option<String>,
    /// Context features (comma separated; default: the feature itself).
    #[arg(long, value_delimiter = ',')]
    pub context: Vec<String>,
    /// Score the summed contributions of feature and the second context
    /// feature over the pair context.
    #[arg(long)]
    pub summed: bool,
    /// Neighbor count for the kernel estimator.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlotArgs {
    #[command(subcommand)]
    pub kind: PlotKindCmd,
}

#[derive(Subcommand)]
pub enum PlotKindCmd {
    /// Main-effect plots (all features, ordered by contribution variance).
    Main(PlotCommon),
    /// Two-feature interaction plot.
    Interact(PlotInteractArgs),
    /// Probability-simplex plots (3-class models).
    Simplex(PlotSimplexArgs),
    /// Aligned per-class contribution plot.
    Aligned(PlotAlignedArgs),
}

#[derive(Args)]
pub struct PlotCommon {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Reuse a contribution bundle written by `decompose` instead of
    /// recomputing.
    #[arg(long)]
    pub contributions: Option<PathBuf>,
    #[arg(long)]
    pub plain: bool,
    /// Only this feature (default: every feature).
    #[arg(long)]
    pub feature: Option<String>,
    /// feature:NAME | pca | class
    #[arg(long)]
    pub color_by: Option<String>,
    #[arg(long)]
    pub no_gov: bool,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
    #[arg(long, default_value_t = 600.0)]
    pub height: f64,
    /// Camera yaw for 3d plots, degrees.
    #[arg(long, default_value_t = 35.0)]
    pub azimuth: f64,
    /// Camera pitch for 3d plots, degrees.
    #[arg(long, default_value_t = 25.0)]
    pub elevation: f64,
}

#[derive(Args)]
pub struct PlotInteractArgs {
    #[command(flatten)]
    pub common: PlotCommon,
    /// The two features, e.g. `x3,x4`.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    /// Plot the summed pair contribution instead of the first feature's.
    #[arg(long)]
    pub summed: bool,
}

#[derive(Args)]
pub struct PlotSimplexArgs {
    #[command(flatten)]
    pub common: PlotCommon,
    /// Plot the ensemble predictions instead of one feature's displacement.
    #[arg(long)]
    pub predictions: bool,
}

#[derive(Args)]
pub struct PlotAlignedArgs {
    #[command(flatten)]
    pub common: PlotCommon,
}

#[derive(Args)]
pub struct BaselineArgs {
    #[command(subcommand)]
    pub kind: BaselineKindCmd,
}

#[derive(Subcommand)]
pub enum BaselineKindCmd {
    /// Sensitivity analysis: grid predictions at the training centroid.
    Sa(BaselineCommon),
    /// Partial dependence: grid predictions averaged over training rows.
    Pd(BaselineCommon),
    /// Individual conditional expectation curves.
    Ice(BaselineIceArgs),
}

#[derive(Args)]
pub struct BaselineCommon {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// One or two varied features, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    #[arg(long, default_value_t = 50)]
    pub grid_cap: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Also render an SVG next to the CSV (1D grids).
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args)]
pub struct BaselineIceArgs {
    #[command(flatten)]
    pub common: BaselineCommon,
    /// Center every curve at the grid minimum.
    #[arg(long)]
    pub centered: bool,
}

#[derive(Args)]
pub struct ReproArgs {
    /// toy | wwq | cmc
    pub study: String,
    #[arg(long, default_value = "repro-out")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Dataset file for wwq/cmc (UCI files on disk).
    #[arg(long)]
    pub data: Option<PathBuf>,
}

/// Command failure: either a core error or failed embedded checks.
pub enum CliError {
    Core(Error),
    Checks(Vec<String>),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Checks(_) => 1,
        CliError::Core(e) => match e {
            Error::Io { .. } => 3,
            Error::Config(_)
            | Error::SchemaMismatch(_)
            | Error::CsvParse { .. }
            | Error::MissingValue { .. }
            | Error::EmptyDataset(_) => 2,
            _ => 1,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads.or_else(|| {
        std::env::var("FF_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    }) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let started = std::time::Instant::now();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Train(args) => commands::train(&args),
        Command::Decompose(args) => commands::decompose(&args),
        Command::Gov(args) => commands::gov(&args),
        Command::Plot(args) => commands::plot(&args),
        Command::Baseline(args) => commands::baseline(&args),
        Command::Repro(args) => repro::run(&args),
    };
    eprintln!("elapsed: {:?}", started.elapsed());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Core(e) => eprintln!("error: {e}"),
                CliError::Checks(failures) => {
                    for f in failures {
                        eprintln!("check failed: {f}");
                    }
                }
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
