//! Command-line front end for the isingopt experiment harness.
//!
//! Subcommands: `oracle` exports the local-minima catalog of the benchmark
//! objective, `run` executes one seeded optimizer run, `bench` replicates a
//! run over many seeds, `sweep` compares convergence curves across a panel
//! of configurations, `phase` records lattice population spread across
//! acceptance temperatures, and `ensemble` counts how many of the best
//! minima each run discovers. All data goes to CSV files; each command
//! prints one machine-greppable summary line to stdout.
//!
//! Exit codes: 0 on success, 2 for malformed command lines (unknown flags
//! or algorithms), 1 for everything that fails after parsing.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use isingopt_core::csvfmt::sci;
use isingopt_core::harness::{
    budget_sweep, default_checkpoints, default_step_schedule, ensemble_coverage, phase_sweep,
    replicate, write_ensemble_csv, write_phase_csv, write_runs_csv, write_trace_csv,
    ExperimentPlan, PhaseSweepPlan, DEFAULT_BUDGET, DEFAULT_RUNS,
};
use isingopt_core::lattice::write_snapshots_csv;
use isingopt_core::{
    AlgorithmConfig, AnnealingConfig, CellularConfig, IsingConfig, LatticeDims, MinimaCatalog,
    MixtureConfig, MutationConfig, ObjectiveSpec, VariationParams,
};

use config::{pick, resolve_algorithm, AlgoArgs, DimsArg, FileConfig};

#[derive(Debug, Parser)]
#[command(name = "isingopt", version, about = "Lattice evolution experiments on a sine benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Export the catalog of all local minima of the benchmark objective.
    Oracle(OracleArgs),
    /// Execute one seeded optimizer run.
    Run(RunArgs),
    /// Replicate an optimizer run over many seeds and aggregate.
    Bench(BenchArgs),
    /// Compare convergence curves across a panel of configurations.
    Sweep(SweepArgs),
    /// Record lattice population spread across acceptance temperatures.
    Phase(PhaseArgs),
    /// Count how many of the k best minima each run evaluates.
    Ensemble(EnsembleArgs),
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Destination CSV (rank,argmin,value).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    /// Optional key=value defaults file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed of the run.
    #[arg(long)]
    seed: Option<u64>,
    /// Total objective evaluations, initialization included.
    #[arg(long)]
    budget: Option<u64>,
    /// Destination CSV for the result row.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV of best-so-far samples at log-spaced checkpoints.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    /// Optional key=value defaults file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of runs; run i uses seed + i.
    #[arg(long)]
    runs: Option<usize>,
    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Total objective evaluations per run, initialization included.
    #[arg(long)]
    budget: Option<u64>,
    /// Destination CSV, one row per run.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV of best-so-far samples at log-spaced checkpoints.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated panel entries: ising-1d-900, ising-10x10,
    /// ising-30x30, ising-50x50, cellular, sim-annealing, mutation,
    /// mixture, random-search.
    #[arg(long, value_delimiter = ',')]
    algos: Option<Vec<String>>,
    /// Optional key=value defaults file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Runs per panel entry.
    #[arg(long)]
    runs: Option<usize>,
    /// Base RNG seed, shared by every panel entry.
    #[arg(long)]
    seed: Option<u64>,
    /// Total objective evaluations per run, initialization included.
    #[arg(long)]
    budget: Option<u64>,
    /// Destination CSV of per-checkpoint best-so-far samples.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV of final results, one row per run.
    #[arg(long)]
    runs_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PhaseArgs {
    /// Lattice dimensionality.
    #[arg(long, value_enum)]
    dims: Option<DimsArg>,
    /// Lattice width.
    #[arg(long)]
    width: Option<usize>,
    /// Lattice height; must be 1 when dims is 1.
    #[arg(long)]
    height: Option<usize>,
    /// Comma-separated acceptance temperatures, one lattice per value.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Update steps per lattice (budget is width*height + steps).
    #[arg(long)]
    steps: Option<u64>,
    /// Independent lattices averaged per beta.
    #[arg(long)]
    seeds: Option<usize>,
    /// Base RNG seed; lattice j of every beta uses seed + j.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated update steps at which full grids are kept.
    #[arg(long, value_delimiter = ',')]
    snapshot_steps: Option<Vec<u64>>,
    /// Optional key=value defaults file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Destination CSV of population-spread measurements.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV of the kept grids.
    #[arg(long)]
    snapshots_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    /// Optional key=value defaults file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of runs; run i uses seed + i.
    #[arg(long)]
    runs: Option<usize>,
    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Total objective evaluations per run, initialization included.
    #[arg(long)]
    budget: Option<u64>,
    /// How many of the best minima to look for.
    #[arg(long)]
    k: Option<usize>,
    /// Destination CSV, one row per run.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Oracle(args) => cmd_oracle(args),
        Command::Run(args) => cmd_run(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Phase(args) => cmd_phase(args),
        Command::Ensemble(args) => cmd_ensemble(args),
    }
}

fn benchmark_catalog() -> MinimaCatalog {
    MinimaCatalog::enumerate(&ObjectiveSpec::default_benchmark())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let catalog = benchmark_catalog();
    let mut buf = Vec::new();
    catalog.write_csv(&mut buf)?;
    write_file(&args.out, &buf)?;
    println!("minima={} mean_value={}", catalog.len(), sci(catalog.mean_value()));
    Ok(())
}

/// Shared body of `run` and `bench`: replicate, write, summarize.
fn replicate_to_files(
    algorithm: AlgorithmConfig,
    n_runs: usize,
    budget: u64,
    base_seed: u64,
    out: &Path,
    trace_out: Option<&Path>,
) -> Result<()> {
    let plan = ExperimentPlan {
        algorithm,
        n_runs,
        budget,
        base_seed,
        checkpoint_schedule: default_checkpoints(budget),
    };
    let catalog = benchmark_catalog();
    let replication = replicate(&plan, &catalog)?;

    let mut buf = Vec::new();
    write_runs_csv(std::slice::from_ref(&replication), &mut buf)?;
    write_file(out, &buf)?;
    if let Some(path) = trace_out {
        let mut buf = Vec::new();
        write_trace_csv(std::slice::from_ref(&replication), &mut buf)?;
        write_file(path, &buf)?;
    }
    println!(
        "mean_best_f={} runs={} evals={}",
        sci(replication.stats.mean_best_f),
        n_runs,
        budget
    );
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut file = FileConfig::load(args.config.as_deref())?;
    let algorithm = resolve_algorithm(&args.algo, &mut file)?;
    let seed = pick(args.seed, file.take("seed")?, 0);
    let budget = pick(args.budget, file.take("budget")?, DEFAULT_BUDGET);
    file.finish()?;
    replicate_to_files(algorithm, 1, budget, seed, &args.out, args.trace_out.as_deref())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let mut file = FileConfig::load(args.config.as_deref())?;
    let algorithm = resolve_algorithm(&args.algo, &mut file)?;
    let runs = pick(args.runs, file.take("runs")?, DEFAULT_RUNS);
    let seed = pick(args.seed, file.take("seed")?, 0);
    let budget = pick(args.budget, file.take("budget")?, DEFAULT_BUDGET);
    file.finish()?;
    replicate_to_files(algorithm, runs, budget, seed, &args.out, args.trace_out.as_deref())
}

/// Named configurations available to `sweep` panels.
fn sweep_entry(token: &str) -> Result<AlgorithmConfig> {
    let ising = |dims, width, height| {
        AlgorithmConfig::Ising(IsingConfig {
            dims,
            width,
            height,
            beta: 100.0,
            variation: VariationParams::default(),
        })
    };
    Ok(match token {
        "ising-1d-900" => ising(LatticeDims::One, 900, 1),
        "ising-10x10" => ising(LatticeDims::Two, 10, 10),
        "ising-30x30" => ising(LatticeDims::Two, 30, 30),
        "ising-50x50" => ising(LatticeDims::Two, 50, 50),
        "cellular" => AlgorithmConfig::Cellular(CellularConfig::default()),
        "sim-annealing" => AlgorithmConfig::SimAnnealing(AnnealingConfig::default()),
        "mutation" => AlgorithmConfig::Mutation(MutationConfig::default()),
        "mixture" => AlgorithmConfig::Mixture(MixtureConfig::default()),
        "random-search" => AlgorithmConfig::RandomSearch,
        _ => bail!(
            "unknown sweep entry '{token}' (expected ising-1d-900, ising-10x10, \
             ising-30x30, ising-50x50, cellular, sim-annealing, mutation, mixture, \
             or random-search)"
        ),
    })
}

const DEFAULT_SWEEP_PANEL: &str = "ising-1d-900,ising-10x10,ising-30x30,ising-50x50,random-search";

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut file = FileConfig::load(args.config.as_deref())?;
    let tokens = pick(
        args.algos,
        file.take_list::<String>("algos")?,
        DEFAULT_SWEEP_PANEL.split(',').map(str::to_string).collect(),
    );
    let runs = pick(args.runs, file.take("runs")?, DEFAULT_RUNS);
    let seed = pick(args.seed, file.take("seed")?, 0);
    let budget = pick(args.budget, file.take("budget")?, DEFAULT_BUDGET);
    file.finish()?;

    let checkpoints = default_checkpoints(budget);
    let plans: Vec<ExperimentPlan> = tokens
        .iter()
        .map(|token| {
            Ok(ExperimentPlan {
                algorithm: sweep_entry(token)?,
                n_runs: runs,
                budget,
                base_seed: seed,
                checkpoint_schedule: checkpoints.clone(),
            })
        })
        .collect::<Result<_>>()?;

    let catalog = benchmark_catalog();
    let sweep = budget_sweep(&plans, &catalog)?;

    let mut buf = Vec::new();
    write_trace_csv(&sweep.replications, &mut buf)?;
    write_file(&args.out, &buf)?;
    if let Some(path) = &args.runs_out {
        let mut buf = Vec::new();
        write_runs_csv(&sweep.replications, &mut buf)?;
        write_file(path, &buf)?;
    }

    for rep in &sweep.replications {
        println!(
            "algo={} config={} mean_best_f={}",
            rep.plan.algorithm.algorithm_name(),
            rep.plan.algorithm.config_id(),
            sci(rep.stats.mean_best_f)
        );
    }
    let references: Vec<String> = sweep.reference_values.iter().map(|&v| sci(v)).collect();
    println!("references={}", references.join(","));
    Ok(())
}

/// Steps at which `phase` keeps full grids when none are requested: the
/// standard {0, 1e3, 1e4, 1e5} progression clipped to the run length.
fn default_snapshot_steps(steps: u64) -> Vec<u64> {
    let mut points: Vec<u64> =
        [0, 1_000, 10_000, 100_000].into_iter().filter(|&s| s <= steps).collect();
    if points.last() != Some(&steps) {
        points.push(steps);
    }
    points
}

fn cmd_phase(args: PhaseArgs) -> Result<()> {
    let mut file = FileConfig::load(args.config.as_deref())?;
    let dims: LatticeDims = pick(args.dims, file.take("dims")?, DimsArg::Two).into();
    let (default_width, default_height) = match dims {
        LatticeDims::One => (900, 1),
        LatticeDims::Two => (30, 30),
    };
    let width = pick(args.width, file.take("width")?, default_width);
    let height = pick(args.height, file.take("height")?, default_height);
    let betas = pick(args.betas, file.take_list("betas")?, vec![0.1, 1.0, 10.0, 100.0]);
    let steps = pick(args.steps, file.take("steps")?, DEFAULT_BUDGET);
    let n_seeds = pick(args.seeds, file.take("seeds")?, 1);
    let base_seed = pick(args.seed, file.take("seed")?, 0);
    let snapshot_steps = pick(
        args.snapshot_steps,
        file.take_list("snapshot-steps")?,
        default_snapshot_steps(steps),
    );
    file.finish()?;

    let plan = PhaseSweepPlan {
        betas,
        dims,
        width,
        height,
        steps,
        rel_std_schedule: default_step_schedule(steps),
        snapshot_steps,
        base_seed,
        n_seeds,
        variation: VariationParams::default(),
    };
    let catalog = benchmark_catalog();
    let result = phase_sweep(&plan, &catalog)?;

    let mut buf = Vec::new();
    write_phase_csv(&result, &mut buf)?;
    write_file(&args.out, &buf)?;
    if let Some(path) = &args.snapshots_out {
        let mut buf = Vec::new();
        write_snapshots_csv(&result.snapshots, &mut buf)?;
        write_file(path, &buf)?;
    }
    println!("entries={} snapshots={}", result.entries.len(), result.snapshots.len());
    Ok(())
}

fn cmd_ensemble(args: EnsembleArgs) -> Result<()> {
    let mut file = FileConfig::load(args.config.as_deref())?;
    let algorithm = resolve_algorithm(&args.algo, &mut file)?;
    let runs = pick(args.runs, file.take("runs")?, DEFAULT_RUNS);
    let seed = pick(args.seed, file.take("seed")?, 0);
    let budget = pick(args.budget, file.take("budget")?, DEFAULT_BUDGET);
    let k = pick(args.k, file.take("k")?, 10);
    file.finish()?;

    let plan = ExperimentPlan {
        algorithm,
        n_runs: runs,
        budget,
        base_seed: seed,
        checkpoint_schedule: default_checkpoints(budget),
    };
    let catalog = benchmark_catalog();
    let coverage = ensemble_coverage(&plan, &catalog, k)?;

    let mut buf = Vec::new();
    write_ensemble_csv(&plan, &coverage, &mut buf)?;
    write_file(&args.out, &buf)?;
    println!("mean_found={} runs={} evals={}", sci(coverage.mean_found), runs, budget);
    Ok(())
}
