//! `tropnet` — batch front end for exact tropical analysis of ReLU networks.

mod commands;
mod experiments;
mod manifest;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "tropnet",
    version,
    about = "Exact tropical-geometry analysis of ReLU networks"
)]
pub struct Cli {
    /// RNG seed for anything randomized.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for per-trial parallelism (also TROPNET_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Row cap for exhaustive Hoffman subset enumeration.
    #[arg(long, global = true, default_value_t = 16)]
    pub subset_cap: usize,

    /// Output directory for reports and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Convert a model into its tropical rational map.
    Tropicalize {
        model: PathBuf,
        /// Also write the pruned representation.
        #[arg(long)]
        prune: bool,
    },
    /// Exact linear regions of a model output.
    Regions {
        model: PathBuf,
        /// Output coordinate to analyze; required for multi-output models.
        #[arg(long)]
        logit: Option<usize>,
    },
    /// Exact linear regions of a tropical polynomial or quotient.
    #[command(name = "regions-trop")]
    RegionsTrop {
        numerator: PathBuf,
        denominator: Option<PathBuf>,
    },
    /// Remove redundant monomials from a tropical polynomial.
    Prune { polynomial: PathBuf },
    /// Hoffman constant of a matrix, polynomial, or model.
    Hoffman {
        /// Matrix ({"A": [[..]]}), polynomial ([{"coeff","exps"}..]), or
        /// model ({"architecture": ..}) JSON file.
        input: PathBuf,
        /// Exact subset enumeration (the default).
        #[arg(long, conflicts_with_all = ["lower", "upper"])]
        exact: bool,
        /// Sampled lower bound with this many iterations.
        #[arg(long, value_name = "B", conflicts_with = "upper")]
        lower: Option<usize>,
        /// Exhaustive singular-value upper bound.
        #[arg(long)]
        upper: bool,
    },
    /// Sampling-radius bound of a model at a point.
    Radius {
        model: PathBuf,
        /// JSON array of rationals, e.g. ["0", "1/2"].
        #[arg(long)]
        at: PathBuf,
    },
    /// Numerical region estimate by Jacobian sampling.
    Sample {
        model: PathBuf,
        #[arg(short = 'R', long, default_value_t = 5.0)]
        radius: f64,
        #[arg(short = 'N', long, default_value_t = 1000)]
        npoints: usize,
        /// Restrict to the descending fundamental cone with multiplicity
        /// weighting (permutation-invariant models).
        #[arg(long)]
        fundamental: bool,
        /// Lattice sampling instead of uniform.
        #[arg(long)]
        grid: bool,
    },
    /// Reproduce an experiment table or figure as CSV.
    Experiment {
        /// One of: table-symbolic-vs-numerical, width-depth, pruning-rate,
        /// ratio-estimates, hoffman-tables.
        name: String,
        /// Architectures like "[6,2,1];[5,3,1]" where applicable.
        #[arg(long)]
        archs: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(short = 'N', long)]
        npoints: Option<usize>,
        #[arg(short = 'R', long)]
        radius: Option<f64>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("TROPNET_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building the worker pool")?;
    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("creating output directory {}", cli.out.display()))?;
    pool.install(|| commands::dispatch(&cli))
}
