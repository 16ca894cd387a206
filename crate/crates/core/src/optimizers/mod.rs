//! The lattice optimizer and its five reference algorithms, behind one
//! config-enum entry point.
//!
//! All six runners share the same observable contract: they spend the whole
//! evaluation budget of a [`BudgetedEvaluator`], track the best candidate
//! ever evaluated, record an improvement trace indexed by evaluation count,
//! and note every evaluated point that is a cataloged local minimum.

mod chain;
mod lattice_run;
mod mixture;
mod random_search;

use std::collections::BTreeSet;

use rand::Rng;

pub use chain::{run_mutation, run_sim_annealing, AnnealingConfig, MutationConfig};
pub use lattice_run::{run_cellular, run_ising, CellularConfig, IsingConfig, LatticeRun};
pub use mixture::{run_mixture, MixtureConfig, MixtureRun};
pub use random_search::run_random_search;

use crate::error::ConfigError;
use crate::objective::{BudgetedEvaluator, MinimaCatalog};

/// Metropolis-style acceptance at a fixed inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceRule {
    beta: f64,
}

impl AcceptanceRule {
    pub fn new(beta: f64) -> Result<Self, ConfigError> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(ConfigError::BadBeta(beta));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Probability of replacing a value of quality `old` with one of quality
    /// `new` (lower is better): 1 for an improvement, `exp(beta * (old -
    /// new))` otherwise. Equal qualities are accepted with probability 1.
    pub fn probability(&self, old: f64, new: f64) -> f64 {
        if old > new {
            1.0
        } else {
            (self.beta * (old - new)).exp()
        }
    }
}

/// Free-function form of [`AcceptanceRule::probability`].
pub fn acceptance_probability(old: f64, new: f64, rule: &AcceptanceRule) -> f64 {
    rule.probability(old, new)
}

/// One point of an improvement trace: after `eval_index` evaluations the
/// best value seen so far dropped to `best_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// Total evaluations consumed when the improvement landed (1-based).
    pub eval_index: u64,
    pub best_f: f64,
}

/// Outcome of a single optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Best candidate retained by the algorithm's own bookkeeping.
    pub best_x: i64,
    pub best_f: f64,
    /// Evaluations actually consumed; equals the budget for all runners here.
    pub evals_used: u64,
    /// Strictly improving checkpoints of `best_f`, ascending in
    /// `eval_index`. The first evaluation always contributes the first point.
    pub trace: Vec<TracePoint>,
    /// Every cataloged local-minimum argmin the run evaluated at least once,
    /// whether or not the proposal was kept.
    pub hits: BTreeSet<i64>,
}

impl RunResult {
    /// Best value seen once `eval_index` evaluations had been spent.
    ///
    /// Returns infinity before the first evaluation.
    pub fn best_f_at(&self, eval_index: u64) -> f64 {
        match self.trace.partition_point(|p| p.eval_index <= eval_index) {
            0 => f64::INFINITY,
            n => self.trace[n - 1].best_f,
        }
    }
}

/// Shared bookkeeping: best-so-far, improvement trace, and catalog hits.
#[derive(Debug)]
pub(crate) struct BestTracker {
    best_x: i64,
    best_f: f64,
    trace: Vec<TracePoint>,
    hits: BTreeSet<i64>,
}

impl BestTracker {
    pub(crate) fn new() -> Self {
        Self { best_x: 0, best_f: f64::INFINITY, trace: Vec::new(), hits: BTreeSet::new() }
    }

    /// Notes that `x` was evaluated, for catalog-coverage accounting.
    pub(crate) fn record_eval(&mut self, x: i64, catalog: &MinimaCatalog) {
        if catalog.contains_argmin(x) {
            self.hits.insert(x);
        }
    }

    /// Offers a kept candidate; extends the trace only on strict improvement.
    pub(crate) fn record_best(&mut self, eval_index: u64, x: i64, f: f64) {
        if f < self.best_f {
            self.best_x = x;
            self.best_f = f;
            self.trace.push(TracePoint { eval_index, best_f: f });
        }
    }

    pub(crate) fn into_result(self, evals_used: u64) -> RunResult {
        RunResult {
            best_x: self.best_x,
            best_f: self.best_f,
            evals_used,
            trace: self.trace,
            hits: self.hits,
        }
    }
}

/// Tagged configuration for any of the six algorithms, so harness plans and
/// the CLI can treat them uniformly.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmConfig {
    Ising(IsingConfig),
    Cellular(CellularConfig),
    SimAnnealing(AnnealingConfig),
    Mutation(MutationConfig),
    Mixture(MixtureConfig),
    RandomSearch,
}

impl AlgorithmConfig {
    /// Stable lowercase name used in CSV exports.
    pub fn algorithm_name(&self) -> &'static str {
        match self {
            AlgorithmConfig::Ising(_) => "ising",
            AlgorithmConfig::Cellular(_) => "cellular",
            AlgorithmConfig::SimAnnealing(_) => "sim-annealing",
            AlgorithmConfig::Mutation(_) => "mutation",
            AlgorithmConfig::Mixture(_) => "mixture",
            AlgorithmConfig::RandomSearch => "random-search",
        }
    }

    /// Compact human-readable parameter summary for CSV rows, e.g.
    /// `2d-30x30-beta100`.
    pub fn config_id(&self) -> String {
        // f64 Display is already the shortest round-tripping form, so
        // 100.0 renders as "100" and 0.1 as "0.1".
        fn num(v: f64) -> String {
            format!("{v}")
        }
        match self {
            AlgorithmConfig::Ising(c) => {
                format!("{}d-{}x{}-beta{}", c.dims.as_u8(), c.width, c.height, num(c.beta))
            }
            AlgorithmConfig::Cellular(c) => format!(
                "{}d-{}x{}-keep{}",
                c.dims.as_u8(),
                c.width,
                c.height,
                num(c.accept_worse_prob)
            ),
            AlgorithmConfig::SimAnnealing(c) => format!("beta0-{}", num(c.beta0)),
            AlgorithmConfig::Mutation(c) => format!("std{}", num(c.variation.mutation_std)),
            AlgorithmConfig::Mixture(c) => {
                format!("pop{}-keep{}", c.pop_size, num(c.keep_prob))
            }
            AlgorithmConfig::RandomSearch => "uniform".to_string(),
        }
    }

    /// Validates the configuration against an evaluation budget.
    pub fn validate(&self, budget: u64) -> Result<(), ConfigError> {
        match self {
            AlgorithmConfig::Ising(c) => c.validate(budget),
            AlgorithmConfig::Cellular(c) => c.validate(budget),
            AlgorithmConfig::SimAnnealing(c) => c.validate(budget),
            AlgorithmConfig::Mutation(c) => c.validate(budget),
            AlgorithmConfig::Mixture(c) => c.validate(budget),
            AlgorithmConfig::RandomSearch => {
                if budget == 0 {
                    return Err(ConfigError::BudgetTooSmall { budget, needed: 1 });
                }
                Ok(())
            }
        }
    }

    /// Runs the configured algorithm until `ev` is exhausted.
    pub fn run<R: Rng + ?Sized>(
        &self,
        ev: &mut BudgetedEvaluator,
        catalog: &MinimaCatalog,
        rng: &mut R,
    ) -> Result<RunResult, ConfigError> {
        match self {
            AlgorithmConfig::Ising(c) => run_ising(c, ev, catalog, rng),
            AlgorithmConfig::Cellular(c) => run_cellular(c, ev, catalog, rng),
            AlgorithmConfig::SimAnnealing(c) => run_sim_annealing(c, ev, catalog, rng),
            AlgorithmConfig::Mutation(c) => run_mutation(c, ev, catalog, rng),
            AlgorithmConfig::Mixture(c) => run_mixture(c, ev, catalog, rng),
            AlgorithmConfig::RandomSearch => run_random_search(ev, catalog, rng),
        }
    }
}
