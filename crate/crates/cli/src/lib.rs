//! Command implementations behind the `spdrange` binary.
//!
//! Every subcommand is deterministic given its flags: randomness flows
//! through substreams of the `--seed` flag only, so identical invocations
//! produce byte-identical output.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use spdrange::clustering::{InitStrategy, KmeansConfig};
use spdrange::experiments::{
    clustering_csv, clustering_experiment, convergence_csv, convergence_experiment,
    gen_random_spd, invariance_csv, invariance_experiment, ClusteringAlgorithm, ExperimentConfig,
};
use spdrange::io::{
    accuracy_to_csv, cone_export_csv, dataset_from_json, dataset_to_json, matrix_to_csv,
    matrix_to_json, model_to_json, trace_to_csv,
};
use spdrange::midrange::{ImrConfig, ImrInit};
use spdrange::rng::stream;
use spdrange::{Dataset, Error};

#[derive(Parser, Debug)]
#[command(
    name = "spdrange",
    about = "Thompson-metric midranges and clustering on the SPD cone",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random or clustered SPD dataset (JSON).
    Gen(GenArgs),
    /// Run the inductive midrange on a dataset.
    Midrange(MidrangeArgs),
    /// Cluster a dataset.
    #[command(subcommand)]
    Cluster(ClusterCommand),
    /// Run an experiment suite and emit its CSV table.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Project a d = 2 dataset (and optionally an IMR trace and activity
    /// roles) into cone coordinates as CSV.
    ConeExport(ConeExportArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Matrix dimension d.
    #[arg(long)]
    pub dim: usize,
    /// Number of points.
    #[arg(long)]
    pub n: usize,
    /// Number of ground-truth clusters; 0 generates unclustered data.
    #[arg(long, default_value_t = 0)]
    pub clusters: usize,
    /// Thompson radius of each cluster.
    #[arg(long, default_value_t = 0.2)]
    pub radius: f64,
    /// Minimum pairwise Thompson distance between cluster centers.
    #[arg(long, default_value_t = 1.0)]
    pub min_sep: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct MidrangeArgs {
    /// Dataset JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// IMR iterations.
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    /// Index of the data point used as initialization.
    #[arg(long, default_value_t = 0)]
    pub init_index: usize,
    /// Write the iteration trace CSV to this path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Report the minimax cost of the result on stderr.
    #[arg(long)]
    pub cost: bool,
    /// Also run the d = 2 optimization-midrange oracle and report the
    /// comparison on stderr.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ClusterCommand {
    /// K-means with IMR centroids.
    Kmeans(KmeansArgs),
    /// K-means seeded by squared-distance weighting.
    Kmeanspp(KmeansppArgs),
    /// X-means with BIC-scored binary splits.
    Xmeans(XmeansArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum InitChoice {
    Kmeanspp,
    RandomPoints,
    RandomLabels,
}

#[derive(Args, Debug)]
pub struct KmeansArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitChoice::Kmeanspp)]
    pub init: InitChoice,
    #[arg(long, default_value_t = 500)]
    pub imr_iters: usize,
    #[arg(long, default_value_t = 100)]
    pub max_rounds: usize,
    /// Score against ground-truth labels and report on stderr.
    #[arg(long)]
    pub score: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KmeansppArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub imr_iters: usize,
    #[arg(long, default_value_t = 100)]
    pub max_rounds: usize,
    #[arg(long)]
    pub score: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct XmeansArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Initial lower bound on the cluster count.
    #[arg(long, default_value_t = 1)]
    pub k0: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub max_splits: usize,
    #[arg(long, default_value_t = 0.5)]
    pub split_radius_factor: f64,
    #[arg(long, default_value_t = 500)]
    pub imr_iters: usize,
    #[arg(long, default_value_t = 100)]
    pub max_rounds: usize,
    #[arg(long)]
    pub score: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCommand {
    /// Convergence-rate table: log-log slope of the distance to the final
    /// iterate per (d, N) configuration.
    Convergence(ConvergenceArgs),
    /// Initialization-invariance table: separation among final iterates
    /// from random initializations.
    Invariance(InvarianceArgs),
    /// X-means clustering-accuracy table over a list of dimensions.
    Xmeans(ClusterExperimentArgs),
    /// K-means++ clustering-accuracy table over a list of dimensions.
    Kmeanspp(ClusterExperimentArgs),
}

#[derive(Args, Debug)]
pub struct ConvergenceArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    /// Comma-separated dxN configurations.
    #[arg(long, default_value = "5x5,5x20,50x5,50x20")]
    pub configs: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InvarianceArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub inits: usize,
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    /// Comma-separated dxN configurations. Larger dimensions from the full
    /// table (20x5, 100x5) are valid but slow on one core.
    #[arg(long, default_value = "2x5,5x5")]
    pub configs: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClusterExperimentArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Comma-separated matrix dimensions.
    #[arg(long, default_value = "2,5,10,20")]
    pub dims: String,
    /// Points per dataset.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Ground-truth clusters per dataset.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// IMR iterations per centroid inside clustering; 150 keeps centroid
    /// error far below label resolution at a fraction of the default cost.
    #[arg(long, default_value_t = 150)]
    pub imr_iters: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConeExportArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Run IMR for this many iterations and include the trace; 0 skips it.
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    /// Tag data points with active/external/internal roles.
    #[arg(long)]
    pub with_roles: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Maps an error to the documented process exit code: 2 for validation and
/// input errors, 3 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotPositiveDefinite
        | Error::NoConvergence { .. }
        | Error::SingularTransform
        | Error::DegenerateDirection { .. }
        | Error::CenterSamplingExhausted { .. } => 3,
        _ => 2,
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            fs::write(path, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn read_dataset(path: &Path) -> Result<Dataset, Error> {
    let text = fs::read_to_string(path)?;
    dataset_from_json(&text)
}

fn parse_configs(s: &str) -> Result<Vec<(usize, usize)>, Error> {
    s.split(',')
        .map(|part| {
            let (d, n) = part
                .trim()
                .split_once('x')
                .ok_or_else(|| Error::Parse(format!("expected dxN, got '{part}'")))?;
            let d = d.parse().map_err(|e| Error::Parse(format!("bad dimension '{d}': {e}")))?;
            let n = n.parse().map_err(|e| Error::Parse(format!("bad count '{n}': {e}")))?;
            Ok((d, n))
        })
        .collect()
}

fn parse_dims(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad dimension '{part}': {e}")))
        })
        .collect()
}

pub fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Midrange(args) => midrange(args),
        Command::Cluster(cmd) => cluster(cmd),
        Command::Experiment(cmd) => experiment(cmd),
        Command::ConeExport(args) => cone_export(args),
    }
}

fn gen(args: GenArgs) -> Result<(), Error> {
    let mut rng = stream(args.seed, 0);
    let dataset = if args.clusters > 0 {
        let cfg = ExperimentConfig {
            seed: args.seed,
            dim: args.dim,
            n_points: args.n,
            n_clusters: args.clusters,
            cluster_radius: args.radius,
            min_center_separation: args.min_sep,
            ..ExperimentConfig::default()
        };
        spdrange::gen_clustered_dataset(&cfg, &mut rng)?
    } else {
        if args.n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        Dataset::new((0..args.n).map(|_| gen_random_spd(args.dim, &mut rng)).collect())?
    };
    let json = dataset_to_json(&dataset)?;
    write_output(args.out.as_deref(), &json)
}

fn midrange(args: MidrangeArgs) -> Result<(), Error> {
    let dataset = read_dataset(&args.input)?;
    let cfg = ImrConfig::default()
        .with_num_iters(args.iters)
        .with_init(ImrInit::DataIndex(args.init_index))
        .with_trace(args.trace.is_some());
    let (result, trace) = spdrange::inductive_midrange(dataset.points(), &cfg)?;
    if let (Some(path), Some(trace)) = (args.trace.as_deref(), trace) {
        fs::write(path, trace_to_csv(&trace)?)?;
    }
    if args.cost {
        let cost = spdrange::imr_cost(&result, dataset.points())?;
        eprintln!("imr_cost {cost}");
    }
    if args.oracle {
        let oracle = spdrange::optimization_midrange_2d(dataset.points())?;
        let oracle_cost = spdrange::imr_cost(&oracle, dataset.points())?;
        let gap = spdrange::thompson_distance(&result, &oracle)?;
        eprintln!("oracle_cost {oracle_cost}");
        eprintln!("thompson_distance_imr_to_oracle {gap}");
    }
    let rendered = match args.format {
        OutputFormat::Json => matrix_to_json(&result)?,
        OutputFormat::Csv => matrix_to_csv(&result),
    };
    write_output(args.out.as_deref(), &rendered)
}

fn cluster(cmd: ClusterCommand) -> Result<(), Error> {
    let (dataset, model, score, out) = match cmd {
        ClusterCommand::Kmeans(args) => {
            let dataset = read_dataset(&args.input)?;
            let cfg = KmeansConfig { max_rounds: args.max_rounds, imr_iters: args.imr_iters };
            let init = match args.init {
                InitChoice::Kmeanspp => InitStrategy::KMeansPlusPlus,
                InitChoice::RandomPoints => InitStrategy::RandomDataPoints,
                InitChoice::RandomLabels => InitStrategy::RandomLabels,
            };
            let mut rng = stream(args.seed, 0);
            let model = spdrange::kmeans(&dataset, args.k, init, &cfg, &mut rng)?;
            (dataset, model, args.score, args.out)
        }
        ClusterCommand::Kmeanspp(args) => {
            let dataset = read_dataset(&args.input)?;
            let cfg = KmeansConfig { max_rounds: args.max_rounds, imr_iters: args.imr_iters };
            let mut rng = stream(args.seed, 0);
            let model =
                spdrange::kmeans(&dataset, args.k, InitStrategy::KMeansPlusPlus, &cfg, &mut rng)?;
            (dataset, model, args.score, args.out)
        }
        ClusterCommand::Xmeans(args) => {
            let dataset = read_dataset(&args.input)?;
            let cfg = KmeansConfig { max_rounds: args.max_rounds, imr_iters: args.imr_iters };
            let mut rng = stream(args.seed, 0);
            let model = spdrange::xmeans(
                &dataset,
                args.k0,
                args.max_splits,
                args.split_radius_factor,
                &cfg,
                &mut rng,
            )?;
            (dataset, model, args.score, args.out)
        }
    };
    if score {
        let report = spdrange::score_accuracy(&model, &dataset)?;
        eprint!("{}", accuracy_to_csv(&report));
    }
    let json = model_to_json(&model)?;
    write_output(out.as_deref(), &json)
}

fn experiment(cmd: ExperimentCommand) -> Result<(), Error> {
    match cmd {
        ExperimentCommand::Convergence(args) => {
            let configs = parse_configs(&args.configs)?;
            let cfg = ExperimentConfig {
                seed: args.seed,
                runs: args.runs,
                num_iters: args.iters,
                ..ExperimentConfig::default()
            };
            let rows = convergence_experiment(&configs, &cfg)?;
            write_output(args.out.as_deref(), &convergence_csv(&rows, args.seed))
        }
        ExperimentCommand::Invariance(args) => {
            let configs = parse_configs(&args.configs)?;
            let cfg = ExperimentConfig {
                seed: args.seed,
                num_iters: args.iters,
                ..ExperimentConfig::default()
            };
            let rows = invariance_experiment(&configs, &cfg, args.inits)?;
            write_output(args.out.as_deref(), &invariance_csv(&rows, args.seed))
        }
        ExperimentCommand::Xmeans(args) => {
            let rows = run_cluster_experiment(ClusteringAlgorithm::XMeans, &args)?;
            write_output(args.out.as_deref(), &clustering_csv(&rows, args.seed, "x-means"))
        }
        ExperimentCommand::Kmeanspp(args) => {
            let rows = run_cluster_experiment(ClusteringAlgorithm::KMeansPlusPlus, &args)?;
            write_output(args.out.as_deref(), &clustering_csv(&rows, args.seed, "k-means++"))
        }
    }
}

fn run_cluster_experiment(
    algorithm: ClusteringAlgorithm,
    args: &ClusterExperimentArgs,
) -> Result<Vec<spdrange::experiments::ClusteringRow>, Error> {
    let dims = parse_dims(&args.dims)?;
    let cfg = ExperimentConfig {
        seed: args.seed,
        runs: args.runs,
        n_points: args.n,
        n_clusters: args.k,
        ..ExperimentConfig::default()
    };
    let kmeans_cfg = KmeansConfig { max_rounds: 100, imr_iters: args.imr_iters };
    clustering_experiment(algorithm, &dims, &cfg, &kmeans_cfg)
}

fn cone_export(args: ConeExportArgs) -> Result<(), Error> {
    let dataset = read_dataset(&args.input)?;
    let trace = if args.iters > 0 {
        let cfg = ImrConfig::default().with_num_iters(args.iters).with_trace(true);
        let (_, trace) = spdrange::inductive_midrange(dataset.points(), &cfg)?;
        trace
    } else {
        None
    };
    let roles = if args.with_roles {
        Some(spdrange::detect_active_data(dataset.points(), args.iters.max(1000), 0.5)?)
    } else {
        None
    };
    let csv = cone_export_csv(&dataset, trace.as_ref(), roles.as_ref())?;
    write_output(args.out.as_deref(), &csv)
}
