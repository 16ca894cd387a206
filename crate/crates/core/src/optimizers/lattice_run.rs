//! Lattice-population optimizers: Metropolis acceptance (the main algorithm)
//! and a fixed-probability cellular variant.

use rand::Rng;

use super::{AcceptanceRule, BestTracker, RunResult};
use crate::error::ConfigError;
use crate::lattice::{LatticeDims, LatticeState};
use crate::objective::{BudgetedEvaluator, MinimaCatalog};
use crate::variation::{propose, VariationParams};

/// Configuration of the Metropolis lattice optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingConfig {
    pub dims: LatticeDims,
    pub width: usize,
    pub height: usize,
    /// Inverse temperature of the acceptance rule.
    pub beta: f64,
    pub variation: VariationParams,
}

impl Default for IsingConfig {
    fn default() -> Self {
        Self {
            dims: LatticeDims::Two,
            width: 30,
            height: 30,
            beta: 100.0,
            variation: VariationParams::default(),
        }
    }
}

impl IsingConfig {
    pub fn size(&self) -> usize {
        self.width * self.height
    }

    pub fn validate(&self, budget: u64) -> Result<(), ConfigError> {
        validate_shape(self.dims, self.width, self.height, budget)?;
        AcceptanceRule::new(self.beta)?;
        self.variation.validate()
    }
}

/// Configuration of the cellular variant: identical moves, but worsening
/// proposals are accepted with one fixed probability instead of a
/// quality-dependent one.
#[derive(Debug, Clone, PartialEq)]
pub struct CellularConfig {
    pub dims: LatticeDims,
    pub width: usize,
    pub height: usize,
    /// Probability of accepting a proposal that is not an improvement.
    pub accept_worse_prob: f64,
    pub variation: VariationParams,
}

impl Default for CellularConfig {
    fn default() -> Self {
        Self {
            dims: LatticeDims::Two,
            width: 30,
            height: 30,
            accept_worse_prob: 0.10,
            variation: VariationParams::default(),
        }
    }
}

impl CellularConfig {
    pub fn size(&self) -> usize {
        self.width * self.height
    }

    pub fn validate(&self, budget: u64) -> Result<(), ConfigError> {
        validate_shape(self.dims, self.width, self.height, budget)?;
        if !(0.0..=1.0).contains(&self.accept_worse_prob) || self.accept_worse_prob.is_nan() {
            return Err(ConfigError::BadProbability {
                name: "accept_worse_prob",
                value: self.accept_worse_prob,
            });
        }
        self.variation.validate()
    }
}

fn validate_shape(
    dims: LatticeDims,
    width: usize,
    height: usize,
    budget: u64,
) -> Result<(), ConfigError> {
    if dims == LatticeDims::One && height != 1 {
        return Err(ConfigError::BadRingShape { height });
    }
    if width == 0 || height == 0 || width * height < 2 {
        return Err(ConfigError::BadLatticeShape { width, height });
    }
    let size = (width * height) as u64;
    // Initialization costs `size`; at least one update must remain.
    if budget <= size {
        return Err(ConfigError::BudgetTooSmall { budget, needed: size + 1 });
    }
    Ok(())
}

/// How a site update decides whether the proposal replaces the site.
#[derive(Debug, Clone, Copy)]
enum SiteAcceptance {
    Metropolis(AcceptanceRule),
    /// Improvements always pass; anything else passes with this probability.
    FixedWorse(f64),
}

impl SiteAcceptance {
    fn probability(&self, old: f64, new: f64) -> f64 {
        match self {
            SiteAcceptance::Metropolis(rule) => rule.probability(old, new),
            SiteAcceptance::FixedWorse(p) => {
                if new < old {
                    1.0
                } else {
                    *p
                }
            }
        }
    }
}

/// A stepwise lattice run, exposing the population between updates.
///
/// [`run_ising`] and [`run_cellular`] drive this to budget exhaustion; phase
/// sweeps instead call [`step`](LatticeRun::step) themselves and inspect
/// [`lattice`](LatticeRun::lattice) at chosen step counts.
pub struct LatticeRun<'a, R: Rng + ?Sized> {
    lattice: LatticeState,
    acceptance: SiteAcceptance,
    variation: VariationParams,
    ev: &'a mut BudgetedEvaluator,
    catalog: &'a MinimaCatalog,
    rng: &'a mut R,
    tracker: BestTracker,
    steps_taken: u64,
}

impl<'a, R: Rng + ?Sized> LatticeRun<'a, R> {
    pub fn ising(
        cfg: &IsingConfig,
        ev: &'a mut BudgetedEvaluator,
        catalog: &'a MinimaCatalog,
        rng: &'a mut R,
    ) -> Result<Self, ConfigError> {
        cfg.validate(ev.remaining())?;
        let rule = AcceptanceRule::new(cfg.beta).expect("validated");
        Self::new(
            cfg.dims,
            cfg.width,
            cfg.height,
            SiteAcceptance::Metropolis(rule),
            cfg.variation,
            ev,
            catalog,
            rng,
        )
    }

    pub fn cellular(
        cfg: &CellularConfig,
        ev: &'a mut BudgetedEvaluator,
        catalog: &'a MinimaCatalog,
        rng: &'a mut R,
    ) -> Result<Self, ConfigError> {
        cfg.validate(ev.remaining())?;
        Self::new(
            cfg.dims,
            cfg.width,
            cfg.height,
            SiteAcceptance::FixedWorse(cfg.accept_worse_prob),
            cfg.variation,
            ev,
            catalog,
            rng,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn new(
        dims: LatticeDims,
        width: usize,
        height: usize,
        acceptance: SiteAcceptance,
        variation: VariationParams,
        ev: &'a mut BudgetedEvaluator,
        catalog: &'a MinimaCatalog,
        rng: &'a mut R,
    ) -> Result<Self, ConfigError> {
        let used_before = ev.used();
        let lattice = LatticeState::init_uniform(ev, dims, width, height, rng)
            .expect("budget was validated to cover initialization");
        let mut tracker = BestTracker::new();
        // Initialization already evaluated every cell, so the best-so-far
        // and the trace start from the whole initial population.
        for (offset, (&x, &q)) in lattice.cells().iter().zip(lattice.quals()).enumerate() {
            tracker.record_eval(x, catalog);
            tracker.record_best(used_before + offset as u64 + 1, x, q);
        }
        Ok(Self { lattice, acceptance, variation, ev, catalog, rng, tracker, steps_taken: 0 })
    }

    pub fn lattice(&self) -> &LatticeState {
        &self.lattice
    }

    /// Update steps performed so far (initialization is step 0).
    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    /// Performs one site update; returns false without side effects once the
    /// budget is exhausted.
    ///
    /// A step picks a uniform site and one uniform neighbor, proposes either
    /// their average or a Gaussian step off the site, spends one evaluation
    /// on the proposal, and accepts it into the site with the configured
    /// probability. The acceptance uniform is drawn on every step so a run
    /// is one fixed-length stream of random draws.
    pub fn step(&mut self) -> bool {
        if self.ev.is_exhausted() {
            return false;
        }
        let (i, j) = self.lattice.pick_site(self.rng);
        let (ni, nj) = self.lattice.pick_neighbor(i, j, self.rng);
        let proposal = propose(
            self.lattice.cell(i, j),
            self.lattice.cell(ni, nj),
            &self.variation,
            self.lattice.domain(),
            self.rng,
        );
        let qual = self
            .ev
            .evaluate(proposal)
            .expect("proposal is clamped in-domain and budget was checked");
        self.tracker.record_eval(proposal, self.catalog);
        let old = self.lattice.qual(i, j);
        let p = self.acceptance.probability(old, qual);
        if self.rng.random::<f64>() < p {
            self.lattice.set_cell(i, j, proposal, qual);
            self.tracker.record_best(self.ev.used(), proposal, qual);
        }
        self.steps_taken += 1;
        true
    }

    /// Runs site updates until the budget is exhausted.
    pub fn run_to_budget(&mut self) {
        while self.step() {}
    }

    pub fn into_result(self) -> RunResult {
        self.tracker.into_result(self.ev.used())
    }
}

/// Runs the Metropolis lattice optimizer until the budget is exhausted.
pub fn run_ising<R: Rng + ?Sized>(
    cfg: &IsingConfig,
    ev: &mut BudgetedEvaluator,
    catalog: &MinimaCatalog,
    rng: &mut R,
) -> Result<RunResult, ConfigError> {
    let mut run = LatticeRun::ising(cfg, ev, catalog, rng)?;
    run.run_to_budget();
    Ok(run.into_result())
}

/// Runs the fixed-acceptance cellular variant until the budget is exhausted.
pub fn run_cellular<R: Rng + ?Sized>(
    cfg: &CellularConfig,
    ev: &mut BudgetedEvaluator,
    catalog: &MinimaCatalog,
    rng: &mut R,
) -> Result<RunResult, ConfigError> {
    let mut run = LatticeRun::cellular(cfg, ev, catalog, rng)?;
    run.run_to_budget();
    Ok(run.into_result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::ObjectiveSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixtures(budget: u64) -> (BudgetedEvaluator, MinimaCatalog) {
        let spec = ObjectiveSpec::default_benchmark();
        (BudgetedEvaluator::new(spec.clone(), budget), MinimaCatalog::enumerate(&spec))
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn spends_exactly_the_budget() {
        let (mut ev, catalog) = fixtures(5_000);
        let cfg = IsingConfig { width: 10, height: 10, ..Default::default() };
        let result = run_ising(&cfg, &mut ev, &catalog, &mut rng(1)).unwrap();
        assert_eq!(result.evals_used, 5_000);
        assert!(ev.is_exhausted());
    }

    #[test]
    fn rejects_budget_smaller_than_population_plus_one() {
        let (mut ev, catalog) = fixtures(900);
        let cfg = IsingConfig::default();
        let err = run_ising(&cfg, &mut ev, &catalog, &mut rng(1)).unwrap_err();
        assert_eq!(err, ConfigError::BudgetTooSmall { budget: 900, needed: 901 });
        assert_eq!(ev.used(), 0);
    }

    #[test]
    fn rejects_single_site_lattice() {
        let cfg = IsingConfig { width: 1, height: 1, ..Default::default() };
        assert_eq!(
            cfg.validate(1_000).unwrap_err(),
            ConfigError::BadLatticeShape { width: 1, height: 1 }
        );
    }

    #[test]
    fn rejects_ring_with_height_above_one() {
        let cfg = IsingConfig { dims: LatticeDims::One, width: 10, height: 2, ..Default::default() };
        assert_eq!(cfg.validate(1_000).unwrap_err(), ConfigError::BadRingShape { height: 2 });
    }

    #[test]
    fn best_never_worsens_and_matches_trace_tail() {
        let (mut ev, catalog) = fixtures(20_000);
        let cfg = IsingConfig { width: 10, height: 10, ..Default::default() };
        let result = run_ising(&cfg, &mut ev, &catalog, &mut rng(7)).unwrap();
        assert!(!result.trace.is_empty());
        for pair in result.trace.windows(2) {
            assert!(pair[0].best_f > pair[1].best_f);
            assert!(pair[0].eval_index < pair[1].eval_index);
        }
        let tail = result.trace.last().unwrap();
        assert_eq!(tail.best_f, result.best_f);
        assert_eq!(result.best_f, result.best_f_at(result.evals_used));
    }

    #[test]
    fn best_tracks_minimum_over_all_evaluations() {
        // The kept best must equal the true minimum over every evaluation
        // the run made, replayed here through an identical RNG stream.
        let (mut ev, catalog) = fixtures(3_000);
        let cfg = IsingConfig { width: 5, height: 5, ..Default::default() };
        let result = run_ising(&cfg, &mut ev, &catalog, &mut rng(42)).unwrap();

        let spec = ObjectiveSpec::default_benchmark();
        let mut replay_ev = BudgetedEvaluator::new(spec.clone(), 3_000);
        let mut replay_rng = rng(42);
        let mut run = LatticeRun::ising(&cfg, &mut replay_ev, &catalog, &mut replay_rng).unwrap();
        let mut true_min = run.lattice().quals().iter().cloned().fold(f64::INFINITY, f64::min);
        let mut seen = std::collections::HashSet::new();
        for &x in run.lattice().cells() {
            seen.insert(x);
        }
        while run.step() {
            // After each step the lattice holds only evaluated candidates.
            for (idx, &x) in run.lattice().cells().iter().enumerate() {
                if seen.insert(x) {
                    true_min = true_min.min(run.lattice().quals()[idx]);
                }
            }
        }
        assert!(result.best_f <= true_min + 1e-15);
    }

    #[test]
    fn zero_beta_accepts_every_proposal() {
        let (mut ev, catalog) = fixtures(2_000);
        let cfg = IsingConfig { width: 4, height: 4, beta: 0.0, ..Default::default() };
        let mut r = rng(3);
        let mut run = LatticeRun::ising(&cfg, &mut ev, &catalog, &mut r).unwrap();
        // Every proposal must be written into its site. Detecting "written"
        // directly would need the site index, so check a proxy: with beta 0
        // and this seed the lattice keeps changing essentially every step.
        let mut changes = 0;
        for _ in 0..500 {
            let before = run.lattice().cells().to_vec();
            assert!(run.step());
            if before != run.lattice().cells() {
                changes += 1;
            }
        }
        // Only a proposal equal to the site's current value leaves the
        // lattice unchanged, which is rare.
        assert!(changes > 480, "only {changes} of 500 zero-beta steps changed the lattice");
    }

    #[test]
    fn huge_beta_rejects_all_worsening_proposals() {
        let (mut ev, catalog) = fixtures(5_000);
        let cfg = IsingConfig { width: 5, height: 5, beta: 1e9, ..Default::default() };
        let mut r = rng(4);
        let mut run = LatticeRun::ising(&cfg, &mut ev, &catalog, &mut r).unwrap();
        loop {
            let before: Vec<f64> = run.lattice().quals().to_vec();
            if !run.step() {
                break;
            }
            for (idx, (&b, &a)) in before.iter().zip(run.lattice().quals()).enumerate() {
                assert!(
                    a <= b + 1e-15,
                    "site {idx} worsened from {b} to {a} under effectively greedy acceptance"
                );
            }
        }
    }

    #[test]
    fn cellular_accept_worse_zero_is_strictly_greedy() {
        let (mut ev, catalog) = fixtures(5_000);
        let cfg = CellularConfig {
            width: 5,
            height: 5,
            accept_worse_prob: 0.0,
            ..Default::default()
        };
        let mut r = rng(5);
        let mut run = LatticeRun::cellular(&cfg, &mut ev, &catalog, &mut r).unwrap();
        loop {
            let before: Vec<f64> = run.lattice().quals().to_vec();
            if !run.step() {
                break;
            }
            for (&b, &a) in before.iter().zip(run.lattice().quals()) {
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn cellular_accept_worse_one_keeps_everything() {
        let (mut ev, catalog) = fixtures(1_500);
        let cfg = CellularConfig {
            width: 4,
            height: 4,
            accept_worse_prob: 1.0,
            ..Default::default()
        };
        let mut r = rng(6);
        let mut run = LatticeRun::cellular(&cfg, &mut ev, &catalog, &mut r).unwrap();
        let mut changes = 0;
        for _ in 0..400 {
            let before = run.lattice().cells().to_vec();
            assert!(run.step());
            if before != run.lattice().cells() {
                changes += 1;
            }
        }
        assert!(changes > 380);
    }

    #[test]
    fn identical_seeds_give_identical_results() {
        let cfg = IsingConfig { width: 8, height: 8, ..Default::default() };
        let (mut ev1, catalog) = fixtures(4_000);
        let r1 = run_ising(&cfg, &mut ev1, &catalog, &mut rng(11)).unwrap();
        let (mut ev2, _) = fixtures(4_000);
        let r2 = run_ising(&cfg, &mut ev2, &catalog, &mut rng(11)).unwrap();
        assert_eq!(r1, r2);
        let (mut ev3, _) = fixtures(4_000);
        let r3 = run_ising(&cfg, &mut ev3, &catalog, &mut rng(12)).unwrap();
        assert_ne!(r1, r3);
    }

    #[test]
    fn ring_run_spends_budget_too() {
        let (mut ev, catalog) = fixtures(3_000);
        let cfg = IsingConfig {
            dims: LatticeDims::One,
            width: 30,
            height: 1,
            ..Default::default()
        };
        let result = run_ising(&cfg, &mut ev, &catalog, &mut rng(13)).unwrap();
        assert_eq!(result.evals_used, 3_000);
    }

    #[test]
    fn trace_covers_initialization_evaluations() {
        let (mut ev, catalog) = fixtures(2_000);
        let cfg = IsingConfig { width: 10, height: 10, ..Default::default() };
        let result = run_ising(&cfg, &mut ev, &catalog, &mut rng(14)).unwrap();
        assert_eq!(result.trace[0].eval_index, 1);
        // A 100-cell uniform init all but surely improves at least once
        // after the first cell, and all init indices stay within 1..=100.
        assert!(result.trace.iter().filter(|p| p.eval_index <= 100).count() > 1);
        assert!(result.best_f_at(100) < 0.2);
    }

    #[test]
    fn step_after_exhaustion_is_a_noop() {
        let (mut ev, catalog) = fixtures(110);
        let cfg = IsingConfig { width: 10, height: 10, ..Default::default() };
        let mut r = rng(15);
        let mut run = LatticeRun::ising(&cfg, &mut ev, &catalog, &mut r).unwrap();
        let mut steps = 0;
        while run.step() {
            steps += 1;
        }
        assert_eq!(steps, 10);
        assert!(!run.step());
        assert_eq!(run.steps_taken(), 10);
        assert_eq!(run.into_result().evals_used, 110);
    }
}
