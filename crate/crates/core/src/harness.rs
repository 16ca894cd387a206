//! Seeded experiment plans: replicated runs, budget sweeps, phase sweeps,
//! and ensemble coverage, plus the CSV writers for each export.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::csvfmt::sci;
use crate::error::ConfigError;
use crate::lattice::{LatticeDims, Snapshot};
use crate::objective::{BudgetedEvaluator, MinimaCatalog, ObjectiveSpec};
use crate::optimizers::{AlgorithmConfig, IsingConfig, LatticeRun, RunResult};
use crate::variation::VariationParams;

/// Default evaluation budget per run.
pub const DEFAULT_BUDGET: u64 = 100_000;
/// Default number of replicated runs per plan.
pub const DEFAULT_RUNS: usize = 100;

/// Log-spaced checkpoint schedule: 20 points per decade from 100 upward,
/// clipped to the budget, with the budget itself always included last.
///
/// Budgets under 100 collapse to the single checkpoint at the budget.
pub fn default_checkpoints(budget: u64) -> Vec<u64> {
    assert!(budget >= 1, "budget must be positive");
    let mut points: Vec<u64> = (0..)
        .map(|k| 10f64.powf(2.0 + k as f64 / 20.0).round() as u64)
        .take_while(|&c| c <= budget)
        .collect();
    points.dedup();
    if points.last() != Some(&budget) {
        points.push(budget);
    }
    points
}

/// A reproducible batch of runs: one algorithm configuration, `n_runs`
/// seeds derived from `base_seed`, one budget, and the evaluation counts at
/// which convergence is sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub algorithm: AlgorithmConfig,
    pub n_runs: usize,
    pub budget: u64,
    pub base_seed: u64,
    pub checkpoint_schedule: Vec<u64>,
}

impl ExperimentPlan {
    /// A plan with the benchmark defaults: 100 runs at budget 100000 with
    /// the standard log-spaced checkpoints.
    pub fn new(algorithm: AlgorithmConfig, base_seed: u64) -> Self {
        Self {
            algorithm,
            n_runs: DEFAULT_RUNS,
            budget: DEFAULT_BUDGET,
            base_seed,
            checkpoint_schedule: default_checkpoints(DEFAULT_BUDGET),
        }
    }

    /// Seed of run `index` within this plan.
    pub fn seed_of(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_runs == 0 {
            return Err(ConfigError::NoRuns);
        }
        self.algorithm.validate(self.budget)?;
        let sched = &self.checkpoint_schedule;
        let increasing = sched.windows(2).all(|w| w[0] < w[1]);
        if sched.is_empty()
            || !increasing
            || sched[0] == 0
            || *sched.last().unwrap() > self.budget
        {
            return Err(ConfigError::BadCheckpointSchedule);
        }
        Ok(())
    }
}

/// Mean and population standard deviation of best-so-far values across runs
/// at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointStat {
    pub eval_index: u64,
    pub mean_best_f: f64,
    pub std_best_f: f64,
}

/// Cross-run summary of a replicated plan.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    /// Mean of the final best values across runs.
    pub mean_best_f: f64,
    /// Population standard deviation of the final best values.
    pub std_best_f: f64,
    /// Convergence statistics at each checkpoint of the plan's schedule.
    pub per_checkpoint: Vec<CheckpointStat>,
}

/// One run of a replication: its derived seed and full result.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub result: RunResult,
}

/// All runs of an executed plan plus their aggregate statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub plan: ExperimentPlan,
    pub runs: Vec<RunRecord>,
    pub stats: AggregateStats,
}

fn mean_and_pop_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Executes every run of a plan, one independent `ChaCha8Rng` per run seeded
/// with `base_seed + index`, and aggregates the results.
///
/// Runs execute in parallel but are collected in index order, so the output
/// is identical to a sequential execution.
pub fn replicate(plan: &ExperimentPlan, catalog: &MinimaCatalog) -> Result<Replication, ConfigError> {
    plan.validate()?;
    let runs: Vec<RunRecord> = (0..plan.n_runs)
        .into_par_iter()
        .map(|index| {
            let seed = plan.seed_of(index);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ev = BudgetedEvaluator::new(catalog.domain().clone(), plan.budget);
            let result = plan
                .algorithm
                .run(&mut ev, catalog, &mut rng)
                .expect("plan was validated against the budget");
            RunRecord { seed, result }
        })
        .collect();

    let finals: Vec<f64> = runs.iter().map(|r| r.result.best_f).collect();
    let (mean_best_f, std_best_f) = mean_and_pop_std(&finals);
    let per_checkpoint = plan
        .checkpoint_schedule
        .iter()
        .map(|&c| {
            let at: Vec<f64> = runs.iter().map(|r| r.result.best_f_at(c)).collect();
            let (mean, std) = mean_and_pop_std(&at);
            CheckpointStat { eval_index: c, mean_best_f: mean, std_best_f: std }
        })
        .collect::<Vec<_>>();
    debug_assert!(
        per_checkpoint.windows(2).all(|w| w[0].mean_best_f >= w[1].mean_best_f),
        "best-so-far means must be non-increasing across checkpoints"
    );
    Ok(Replication { plan: plan.clone(), runs, stats: AggregateStats {
        mean_best_f,
        std_best_f,
        per_checkpoint,
    }})
}

/// Replications of several plans over a common checkpoint schedule, with
/// catalog reference lines for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetSweep {
    pub replications: Vec<Replication>,
    /// Values of the three best cataloged minima, for horizontal reference
    /// lines under convergence curves.
    pub reference_values: Vec<f64>,
}

/// Runs every plan and bundles the results for a convergence comparison.
///
/// All plans must share one checkpoint schedule so their curves are sampled
/// at the same evaluation counts.
pub fn budget_sweep(
    plans: &[ExperimentPlan],
    catalog: &MinimaCatalog,
) -> Result<BudgetSweep, ConfigError> {
    let first = plans.first().ok_or(ConfigError::NoRuns)?;
    for plan in plans {
        if plan.checkpoint_schedule != first.checkpoint_schedule {
            return Err(ConfigError::MismatchedSchedules);
        }
    }
    let replications: Vec<Replication> =
        plans.iter().map(|p| replicate(p, catalog)).collect::<Result<_, _>>()?;
    let reference_values = catalog.top_k(3)?.iter().map(|m| m.value).collect();
    Ok(BudgetSweep { replications, reference_values })
}

/// Step schedule for phase sweeps: step 0 plus log-spaced points (20 per
/// decade from 1) up to and always including `steps`.
pub fn default_step_schedule(steps: u64) -> Vec<u64> {
    assert!(steps >= 1, "a phase sweep needs at least one step");
    let mut points = vec![0];
    points.extend(
        (0..)
            .map(|k| 10f64.powf(k as f64 / 20.0).round() as u64)
            .take_while(|&c| c <= steps),
    );
    points.dedup();
    if points.last() != Some(&steps) {
        points.push(steps);
    }
    points
}

/// A grid of lattice runs over acceptance temperatures, instrumented with
/// population spread measurements and full-grid snapshots.
///
/// Steps are update steps: step 0 is the freshly initialized lattice and
/// each following step is one site update. The evaluation budget of each
/// run is therefore `width * height + steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSweepPlan {
    pub betas: Vec<f64>,
    pub dims: LatticeDims,
    pub width: usize,
    pub height: usize,
    /// Update steps to run each lattice for.
    pub steps: u64,
    /// Update steps at which `rel_std` is recorded.
    pub rel_std_schedule: Vec<u64>,
    /// Update steps at which a full grid snapshot is kept (first seed only).
    pub snapshot_steps: Vec<u64>,
    pub base_seed: u64,
    /// Independent lattices per beta; `rel_std` is averaged across them.
    pub n_seeds: usize,
    pub variation: VariationParams,
}

impl PhaseSweepPlan {
    /// The benchmark sweep: betas {0.1, 1, 10, 100} on a 30x30 torus for
    /// 100000 steps, snapshots at steps {0, 1000, 10000, 100000}.
    pub fn new(base_seed: u64) -> Self {
        let steps = DEFAULT_BUDGET;
        Self {
            betas: vec![0.1, 1.0, 10.0, 100.0],
            dims: LatticeDims::Two,
            width: 30,
            height: 30,
            steps,
            rel_std_schedule: default_step_schedule(steps),
            snapshot_steps: vec![0, 1_000, 10_000, 100_000],
            base_seed,
            n_seeds: 1,
            variation: VariationParams::default(),
        }
    }

    fn ising_config(&self, beta: f64) -> IsingConfig {
        IsingConfig {
            dims: self.dims,
            width: self.width,
            height: self.height,
            beta,
            variation: self.variation,
        }
    }

    fn budget(&self) -> u64 {
        (self.width * self.height) as u64 + self.steps
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.betas.is_empty() || self.n_seeds == 0 {
            return Err(ConfigError::NoRuns);
        }
        if self.steps == 0 {
            return Err(ConfigError::BadStepSchedule);
        }
        for &beta in &self.betas {
            self.ising_config(beta).validate(self.budget())?;
        }
        for sched in [&self.rel_std_schedule, &self.snapshot_steps] {
            let increasing = sched.windows(2).all(|w| w[0] < w[1]);
            if sched.is_empty() || !increasing || *sched.last().unwrap() > self.steps {
                return Err(ConfigError::BadStepSchedule);
            }
        }
        Ok(())
    }
}

/// Population spread of one lattice at one recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEntry {
    pub dims: LatticeDims,
    pub beta: f64,
    pub step: u64,
    /// Averaged over the plan's seeds.
    pub rel_std: f64,
}

/// All measurements of a phase sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSweepResult {
    pub plan: PhaseSweepPlan,
    /// Beta-major, then step order, matching the plan's schedules.
    pub entries: Vec<PhaseEntry>,
    /// First-seed snapshots, beta-major then step order.
    pub snapshots: Vec<Snapshot>,
}

struct PhaseCell {
    rel_stds: Vec<f64>,
    snapshots: Vec<Snapshot>,
}

fn run_phase_cell(
    plan: &PhaseSweepPlan,
    catalog: &MinimaCatalog,
    domain: &ObjectiveSpec,
    beta: f64,
    seed: u64,
    keep_snapshots: bool,
) -> PhaseCell {
    let cfg = plan.ising_config(beta);
    let mut ev = BudgetedEvaluator::new(domain.clone(), plan.budget());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut run = LatticeRun::ising(&cfg, &mut ev, catalog, &mut rng)
        .expect("phase plan was validated");
    let mut rel_stds = Vec::with_capacity(plan.rel_std_schedule.len());
    let mut snapshots = Vec::new();
    let mut rel_cursor = 0;
    let mut snap_cursor = 0;
    for step in 0..=plan.steps {
        if step > 0 {
            let stepped = run.step();
            debug_assert!(stepped, "budget covers exactly `steps` updates");
        }
        if plan.rel_std_schedule.get(rel_cursor) == Some(&step) {
            rel_stds.push(run.lattice().relative_std());
            rel_cursor += 1;
        }
        if keep_snapshots && plan.snapshot_steps.get(snap_cursor) == Some(&step) {
            snapshots.push(run.lattice().take_snapshot(step, beta));
            snap_cursor += 1;
        }
    }
    PhaseCell { rel_stds, snapshots }
}

/// Runs one lattice per `(beta, seed)` pair and records population spread
/// over update steps, plus full snapshots of the first seed's grids.
///
/// Each cell's RNG is seeded with `base_seed + seed_index`, independent of
/// beta, so all betas start from identical initial populations: differences
/// between their trajectories are purely acceptance effects.
pub fn phase_sweep(
    plan: &PhaseSweepPlan,
    catalog: &MinimaCatalog,
) -> Result<PhaseSweepResult, ConfigError> {
    plan.validate()?;
    let domain = catalog.domain().clone();
    let cells: Vec<PhaseCell> = plan
        .betas
        .iter()
        .flat_map(|&beta| (0..plan.n_seeds).map(move |s| (beta, s)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(beta, seed_index)| {
            run_phase_cell(
                plan,
                catalog,
                &domain,
                beta,
                plan.base_seed.wrapping_add(seed_index as u64),
                seed_index == 0,
            )
        })
        .collect();

    let mut entries = Vec::with_capacity(plan.betas.len() * plan.rel_std_schedule.len());
    let mut snapshots = Vec::new();
    for (b, &beta) in plan.betas.iter().enumerate() {
        let group = &cells[b * plan.n_seeds..(b + 1) * plan.n_seeds];
        for (s, &step) in plan.rel_std_schedule.iter().enumerate() {
            let rel_std =
                group.iter().map(|c| c.rel_stds[s]).sum::<f64>() / plan.n_seeds as f64;
            entries.push(PhaseEntry { dims: plan.dims, beta, step, rel_std });
        }
        snapshots.extend(group[0].snapshots.iter().cloned());
    }
    Ok(PhaseSweepResult { plan: plan.clone(), entries, snapshots })
}

/// How many of the `k` best cataloged minima each run of a plan evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleCoverage {
    pub k: usize,
    /// Found counts per run, in plan seed order. A minimum counts as found
    /// when the run evaluated its exact argmin at least once.
    pub per_run_found: Vec<usize>,
    pub mean_found: f64,
}

/// Counts top-`k` catalog hits for runs that already executed.
pub fn coverage_of_runs(
    runs: &[RunRecord],
    catalog: &MinimaCatalog,
    k: usize,
) -> Result<EnsembleCoverage, ConfigError> {
    let top = catalog.top_k(k)?;
    let per_run_found: Vec<usize> = runs
        .iter()
        .map(|r| top.iter().filter(|m| r.result.hits.contains(&m.argmin)).count())
        .collect();
    let mean_found = if per_run_found.is_empty() {
        0.0
    } else {
        per_run_found.iter().sum::<usize>() as f64 / per_run_found.len() as f64
    };
    Ok(EnsembleCoverage { k, per_run_found, mean_found })
}

/// Replicates a plan and reports how many of the `k` best minima each run
/// discovered.
pub fn ensemble_coverage(
    plan: &ExperimentPlan,
    catalog: &MinimaCatalog,
    k: usize,
) -> Result<EnsembleCoverage, ConfigError> {
    catalog.top_k(k)?;
    let replication = replicate(plan, catalog)?;
    coverage_of_runs(&replication.runs, catalog, k)
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

/// Writes final results as `algorithm,config_id,seed,evals_used,best_x,best_f`.
pub fn write_runs_csv<W: Write>(replications: &[Replication], mut out: W) -> io::Result<()> {
    writeln!(out, "algorithm,config_id,seed,evals_used,best_x,best_f")?;
    for rep in replications {
        let name = rep.plan.algorithm.algorithm_name();
        let config = rep.plan.algorithm.config_id();
        for run in &rep.runs {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                name,
                config,
                run.seed,
                run.result.evals_used,
                run.result.best_x,
                sci(run.result.best_f)
            )?;
        }
    }
    Ok(())
}

/// Writes per-run convergence samples as
/// `algorithm,config_id,seed,eval_index,best_f`, one row per checkpoint.
pub fn write_trace_csv<W: Write>(replications: &[Replication], mut out: W) -> io::Result<()> {
    writeln!(out, "algorithm,config_id,seed,eval_index,best_f")?;
    for rep in replications {
        let name = rep.plan.algorithm.algorithm_name();
        let config = rep.plan.algorithm.config_id();
        for run in &rep.runs {
            for &c in &rep.plan.checkpoint_schedule {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    name,
                    config,
                    run.seed,
                    c,
                    sci(run.result.best_f_at(c))
                )?;
            }
        }
    }
    Ok(())
}

/// Writes phase measurements as `dims,beta,step,rel_std`.
pub fn write_phase_csv<W: Write>(result: &PhaseSweepResult, mut out: W) -> io::Result<()> {
    writeln!(out, "dims,beta,step,rel_std")?;
    for e in &result.entries {
        writeln!(out, "{},{},{},{}", e.dims, e.beta, e.step, sci(e.rel_std))?;
    }
    Ok(())
}

/// Writes ensemble coverage as `algorithm,config_id,seed,found_count`, one
/// row per run in plan seed order.
pub fn write_ensemble_csv<W: Write>(
    plan: &ExperimentPlan,
    coverage: &EnsembleCoverage,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "algorithm,config_id,seed,found_count")?;
    let name = plan.algorithm.algorithm_name();
    let config = plan.algorithm.config_id();
    for (index, found) in coverage.per_run_found.iter().enumerate() {
        writeln!(out, "{},{},{},{}", name, config, plan.seed_of(index), found)?;
    }
    Ok(())
}
