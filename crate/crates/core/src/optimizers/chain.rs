//! Single-chain baselines: simulated annealing with a rising inverse
//! temperature and a strictly greedy mutation hill-climber.

use rand::Rng;

use super::{AcceptanceRule, BestTracker, RunResult};
use crate::error::ConfigError;
use crate::objective::{BudgetedEvaluator, MinimaCatalog};
use crate::variation::{normal_step, VariationParams};

/// Simulated annealing configuration.
///
/// The inverse temperature grows with the square root of the update counter:
/// step `i` accepts with `exp(beta0 * sqrt(i) * (old - new))` when the
/// proposal is no improvement.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealingConfig {
    pub beta0: f64,
    pub variation: VariationParams,
}

impl Default for AnnealingConfig {
    fn default() -> Self {
        Self { beta0: 1.0, variation: VariationParams::default() }
    }
}

impl AnnealingConfig {
    pub fn validate(&self, budget: u64) -> Result<(), ConfigError> {
        AcceptanceRule::new(self.beta0)?;
        self.variation.validate()?;
        validate_chain_budget(budget)
    }
}

/// Greedy mutation configuration: a proposal replaces the current value only
/// when strictly better.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MutationConfig {
    pub variation: VariationParams,
}

impl MutationConfig {
    pub fn validate(&self, budget: u64) -> Result<(), ConfigError> {
        self.variation.validate()?;
        validate_chain_budget(budget)
    }
}

fn validate_chain_budget(budget: u64) -> Result<(), ConfigError> {
    // One evaluation seeds the chain; updates are optional.
    if budget == 0 {
        return Err(ConfigError::BudgetTooSmall { budget, needed: 1 });
    }
    Ok(())
}

pub(crate) enum ChainAcceptance {
    /// Annealed Metropolis: `beta = beta0 * sqrt(step)` with 1-based steps.
    Annealed { beta0: f64 },
    /// Accept only strict improvements, deterministically.
    Greedy,
}

/// Inverse temperature of annealing update `step`, where the first update
/// after the start point is step 1.
pub(crate) fn annealing_beta(beta0: f64, step: u64) -> f64 {
    beta0 * (step as f64).sqrt()
}

/// Where a chain starts; tests inject a fixed point to probe acceptance.
pub(crate) enum ChainStart {
    Uniform,
    #[allow(dead_code)] // constructed only by tests
    At(i64),
}

pub(crate) fn run_chain<R: Rng + ?Sized>(
    acceptance: ChainAcceptance,
    variation: VariationParams,
    start: ChainStart,
    ev: &mut BudgetedEvaluator,
    catalog: &MinimaCatalog,
    rng: &mut R,
) -> Result<RunResult, ConfigError> {
    variation.validate()?;
    validate_chain_budget(ev.remaining())?;
    let domain = ev.spec().clone();
    let mut current = match start {
        ChainStart::Uniform => rng.random_range(domain.lo()..domain.hi()),
        ChainStart::At(x) => x,
    };
    let mut current_qual =
        ev.evaluate(current).expect("start point is in domain and budget covers one evaluation");
    let mut tracker = BestTracker::new();
    tracker.record_eval(current, catalog);
    tracker.record_best(ev.used(), current, current_qual);

    let mut step: u64 = 0;
    while !ev.is_exhausted() {
        step += 1;
        let proposal = normal_step(current, &variation, &domain, rng);
        let qual = ev.evaluate(proposal).expect("proposal is clamped and budget was checked");
        tracker.record_eval(proposal, catalog);
        let accepted = match acceptance {
            ChainAcceptance::Annealed { beta0 } => {
                let beta = annealing_beta(beta0, step);
                let p = if current_qual > qual {
                    1.0
                } else {
                    (beta * (current_qual - qual)).exp()
                };
                rng.random::<f64>() < p
            }
            ChainAcceptance::Greedy => qual < current_qual,
        };
        if accepted {
            current = proposal;
            current_qual = qual;
            tracker.record_best(ev.used(), proposal, qual);
        }
    }
    Ok(tracker.into_result(ev.used()))
}

/// Runs simulated annealing until the budget is exhausted.
pub fn run_sim_annealing<R: Rng + ?Sized>(
    cfg: &AnnealingConfig,
    ev: &mut BudgetedEvaluator,
    catalog: &MinimaCatalog,
    rng: &mut R,
) -> Result<RunResult, ConfigError> {
    cfg.validate(ev.remaining())?;
    run_chain(
        ChainAcceptance::Annealed { beta0: cfg.beta0 },
        cfg.variation,
        ChainStart::Uniform,
        ev,
        catalog,
        rng,
    )
}

/// Runs the greedy mutation hill-climber until the budget is exhausted.
pub fn run_mutation<R: Rng + ?Sized>(
    cfg: &MutationConfig,
    ev: &mut BudgetedEvaluator,
    catalog: &MinimaCatalog,
    rng: &mut R,
) -> Result<RunResult, ConfigError> {
    cfg.validate(ev.remaining())?;
    run_chain(ChainAcceptance::Greedy, cfg.variation, ChainStart::Uniform, ev, catalog, rng)
}
