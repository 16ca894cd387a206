//! Uniform random search over the domain, the no-structure baseline.

use rand::Rng;

use super::{BestTracker, RunResult};
use crate::error::ConfigError;
use crate::objective::{BudgetedEvaluator, MinimaCatalog};

/// Evaluates independent uniform draws until the budget is exhausted and
/// keeps the best.
pub fn run_random_search<R: Rng + ?Sized>(
    ev: &mut BudgetedEvaluator,
    catalog: &MinimaCatalog,
    rng: &mut R,
) -> Result<RunResult, ConfigError> {
    if ev.remaining() == 0 {
        return Err(ConfigError::BudgetTooSmall { budget: ev.budget(), needed: 1 });
    }
    let domain = ev.spec().clone();
    let mut tracker = BestTracker::new();
    while !ev.is_exhausted() {
        let x = rng.random_range(domain.lo()..domain.hi());
        let q = ev.evaluate(x).expect("uniform draw is in domain and budget was checked");
        tracker.record_eval(x, catalog);
        tracker.record_best(ev.used(), x, q);
    }
    Ok(tracker.into_result(ev.used()))
}
