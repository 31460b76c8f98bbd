//! `tcmap`: generate networks, build contagion maps, and measure them.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tcmap::contagion::MapMode;

#[derive(Debug, Parser)]
#[command(name = "tcmap", version, about = "Truncated and full contagion maps")]
struct Cli {
    /// Worker threads for contagion maps and sweeps (default: all cores).
    #[arg(long, global = true, env = "TCMAP_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a network file.
    #[command(subcommand)]
    Generate(Generate),
    /// Build a contagion map from a network file.
    Map(MapArgs),
    /// Persistence barcode and ring stability of a stored map.
    Persist(PersistArgs),
    /// PCA projection of a stored map, optionally scored against labels.
    Embed(EmbedArgs),
    /// Ring stability over a noisiness-by-threshold grid.
    Bifurcation(BifurcationArgs),
    /// Timing sweeps with log-log exponent fits.
    #[command(subcommand)]
    Bench(Bench),
    /// Generate, map, persist and embed in one go, with a JSON report.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Subcommand)]
enum Generate {
    /// Noisy ring lattice.
    Nrl(NrlArgs),
    /// Union-symmetrised k-nearest-neighbour graph of a feature CSV.
    Knn(KnnArgs),
}

#[derive(Debug, Args)]
struct NrlArgs {
    #[arg(long)]
    n: usize,
    /// Geometric degree (even).
    #[arg(long)]
    dg: usize,
    /// Non-geometric degree.
    #[arg(long, default_value_t = 0)]
    dng: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "network.edges")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct KnnArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// The first CSV column holds labels.
    #[arg(long)]
    labeled: bool,
    #[arg(long, default_value = "network.edges")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[arg(long)]
    net: PathBuf,
    /// Activation threshold in [0, 1].
    #[arg(long = "T")]
    threshold: f64,
    /// Stop every contagion after this many steps (default: run to completion).
    #[arg(long)]
    truncate: Option<usize>,
    #[arg(long, default_value = "map.csv")]
    out: PathBuf,
    /// Also write per-step telemetry of the contagion seeded at `--telemetry-node`.
    #[arg(long)]
    telemetry: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    telemetry_node: usize,
}

#[derive(Debug, Args)]
struct PersistArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long, default_value = "barcode.csv")]
    out: PathBuf,
    /// Use a uniform random subset of this many rows.
    #[arg(long)]
    subsample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long)]
    map: PathBuf,
    /// Number of principal components.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Labeled feature CSV whose first column gives one label per node.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Print the cell-group separation of the map (needs `--labels`).
    #[arg(long, requires = "labels")]
    score: bool,
    /// Network file used to add activation times to the projection.
    #[arg(long, requires = "color_node")]
    net: Option<PathBuf>,
    /// Seed node of the contagion whose activation times colour the points.
    #[arg(long, requires = "net")]
    color_node: Option<usize>,
    #[arg(long, default_value = "projection.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BifurcationArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dg: usize,
    /// Noisiness values, `start:end:step` or a single number.
    #[arg(long)]
    alphas: String,
    /// Thresholds, `start:end:step` or a single number.
    #[arg(long = "Ts")]
    thresholds: String,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "bifurcation.csv")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Bench {
    /// Time maps over network sizes.
    Size(SizeArgs),
    /// Time truncated maps over step budgets on one network.
    Steps(StepsArgs),
}

#[derive(Debug, Args)]
struct TimingArgs {
    #[arg(long = "T", default_value_t = 0.3)]
    threshold: f64,
    #[arg(long, default_value_t = 6)]
    dg: usize,
    #[arg(long, default_value_t = 2)]
    dng: usize,
    /// Runs per point; the minimum is kept.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SizeArgs {
    /// `full` or `trunc:<s>`; repeat for several sweeps.
    #[arg(long = "mode", default_values = ["full", "trunc:20"])]
    modes: Vec<MapMode>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "32,64,128,256,512,1024,2048,4096"
    )]
    sizes: Vec<usize>,
    #[command(flatten)]
    timing: TimingArgs,
}

#[derive(Debug, Args)]
struct StepsArgs {
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40,80,160,320")]
    steps: Vec<usize>,
    #[command(flatten)]
    timing: TimingArgs,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Ring lattice size (ignored with `--features`).
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    dg: usize,
    #[arg(long, default_value_t = 2)]
    dng: usize,
    /// Build a kNN graph from this feature CSV instead of a ring lattice.
    #[arg(long)]
    features: Option<PathBuf>,
    /// The first feature column holds labels.
    #[arg(long)]
    labeled: bool,
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long = "T", default_value_t = 0.3)]
    threshold: f64,
    /// Steps per contagion (default: max(1, round(n / 10))).
    #[arg(long)]
    truncate: Option<usize>,
    /// Also build and score the full map.
    #[arg(long)]
    compare_full: bool,
    #[arg(long)]
    subsample: Option<usize>,
    /// Seeds the ring lattice and the subsample.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Principal components in the saved projection.
    #[arg(long, default_value_t = 2)]
    pcs: usize,
    /// Directory for the intermediate network, map, barcode and projection files.
    #[arg(long)]
    save_dir: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let workers = cli.workers;
    match tcmap::with_workers(workers, move || commands::run(cli.command, workers)).and_then(|r| r)
    {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_invalid_argument() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
