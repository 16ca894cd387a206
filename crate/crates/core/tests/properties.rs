//! Randomized invariants of the core building blocks: acceptance law,
//! variation operators, budget accounting, catalog structure, and lattice
//! coherence, each exercised over generated inputs and seeds.

use once_cell::sync::Lazy;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isingopt_core::csvfmt::sci;
use isingopt_core::harness::{replicate, ExperimentPlan};
use isingopt_core::lattice::LatticeState;
use isingopt_core::objective::{DEFAULT_DOMAIN_HI, DEFAULT_DOMAIN_LO};
use isingopt_core::variation::{average_mix, normal_step};
use isingopt_core::{
    acceptance_probability, AcceptanceRule, AlgorithmConfig, AnnealingConfig, BudgetedEvaluator,
    CellularConfig, IsingConfig, LatticeDims, MinimaCatalog, MixtureConfig, MutationConfig,
    ObjectiveSpec, VariationParams,
};

static CATALOG: Lazy<MinimaCatalog> =
    Lazy::new(|| MinimaCatalog::enumerate(&ObjectiveSpec::default_benchmark()));

fn rule(beta: f64) -> AcceptanceRule {
    AcceptanceRule::new(beta).expect("generated beta is valid")
}

proptest! {
    #[test]
    fn acceptance_probability_is_a_probability(
        old in -1.0f64..1.0,
        new in -1.0f64..1.0,
        beta in 0.0f64..1000.0,
    ) {
        let p = acceptance_probability(old, new, &rule(beta));
        prop_assert!((0.0..=1.0).contains(&p));
        if old >= new {
            prop_assert_eq!(p, 1.0);
        }
    }

    #[test]
    fn acceptance_probability_monotone_in_beta_and_gap(
        old in 0.0f64..0.5,
        gap_small in 1e-6f64..0.25,
        gap_extra in 1e-6f64..0.25,
        beta_lo in 0.0f64..500.0,
        beta_extra in 1e-3f64..500.0,
    ) {
        let beta_hi = beta_lo + beta_extra;
        let near = old + gap_small;
        let far = old + gap_small + gap_extra;
        prop_assert!(
            acceptance_probability(old, near, &rule(beta_hi))
                <= acceptance_probability(old, near, &rule(beta_lo))
        );
        prop_assert!(
            acceptance_probability(old, far, &rule(beta_lo))
                <= acceptance_probability(old, near, &rule(beta_lo))
        );
    }

    #[test]
    fn average_mix_is_symmetric_and_bounded(
        a in DEFAULT_DOMAIN_LO..DEFAULT_DOMAIN_HI,
        b in DEFAULT_DOMAIN_LO..DEFAULT_DOMAIN_HI,
    ) {
        let mixed = average_mix(a, b);
        prop_assert_eq!(mixed, average_mix(b, a));
        prop_assert!(a.min(b) <= mixed && mixed <= a.max(b));
    }

    #[test]
    fn normal_step_stays_in_domain(
        x in DEFAULT_DOMAIN_LO..DEFAULT_DOMAIN_HI,
        std in 0.1f64..10_000.0,
        seed in any::<u64>(),
    ) {
        let domain = ObjectiveSpec::default_benchmark();
        let params = VariationParams { mutation_std: std, ..VariationParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let stepped = normal_step(x, &params, &domain, &mut rng);
            prop_assert!((DEFAULT_DOMAIN_LO..DEFAULT_DOMAIN_HI).contains(&stepped));
        }
    }

    #[test]
    fn sci_formatting_round_trips(v in prop_oneof![1e-9f64..1.0, 0.0f64..1e9]) {
        let text = sci(v);
        prop_assert!(text.contains('e'));
        let back: f64 = text.parse().unwrap();
        prop_assert!((back - v).abs() <= v.abs() * 1e-9);
    }

    #[test]
    fn random_search_accounts_for_every_evaluation(
        seed in any::<u64>(),
        budget in 1u64..300,
    ) {
        let plan = ExperimentPlan {
            algorithm: AlgorithmConfig::RandomSearch,
            n_runs: 1,
            budget,
            base_seed: seed,
            checkpoint_schedule: vec![budget],
        };
        let rep = replicate(&plan, &CATALOG).unwrap();
        let run = &rep.runs[0].result;
        prop_assert_eq!(run.evals_used, budget);
        prop_assert!(run.best_f > 0.0);
        let trace_ok = run
            .trace
            .windows(2)
            .all(|w| w[0].eval_index < w[1].eval_index && w[1].best_f <= w[0].best_f);
        prop_assert!(trace_ok);
        let mut last = f64::INFINITY;
        for eval_index in [1, budget / 2 + 1, budget] {
            let best = run.best_f_at(eval_index);
            prop_assert!(best <= last);
            last = best;
        }
    }

    #[test]
    fn catalog_top_k_is_sorted_strict_minima(k in 1usize..=318) {
        let top = CATALOG.top_k(k).unwrap();
        prop_assert_eq!(top.len(), k);
        prop_assert!(top.windows(2).all(|w| w[0].value < w[1].value));
        let domain = CATALOG.domain();
        for minimum in top {
            prop_assert!(domain.raw_value(minimum.argmin - 1) > minimum.value);
            prop_assert!(domain.raw_value(minimum.argmin + 1) > minimum.value);
        }
    }

    #[test]
    fn lattice_init_is_coherent(
        seed in any::<u64>(),
        width in 2usize..8,
        height in 2usize..8,
    ) {
        let domain = ObjectiveSpec::default_benchmark();
        let size = (width * height) as u64;
        let mut ev = BudgetedEvaluator::new(domain.clone(), size + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lattice =
            LatticeState::init_uniform(&mut ev, LatticeDims::Two, width, height, &mut rng)
                .unwrap();
        prop_assert_eq!(ev.remaining(), 1);
        for (cell, qual) in lattice.cells().iter().zip(lattice.quals()) {
            prop_assert!((DEFAULT_DOMAIN_LO..DEFAULT_DOMAIN_HI).contains(cell));
            prop_assert_eq!(qual.to_bits(), domain.raw_value(*cell).to_bits());
        }
    }

    #[test]
    fn sampled_neighbors_are_adjacent_not_self(
        seed in any::<u64>(),
        ring in any::<bool>(),
        width in 2usize..10,
        height in 2usize..10,
    ) {
        let (dims, width, height) =
            if ring { (LatticeDims::One, width * height, 1) } else { (LatticeDims::Two, width, height) };
        let domain = ObjectiveSpec::default_benchmark();
        let mut ev = BudgetedEvaluator::new(domain, (width * height) as u64 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lattice = LatticeState::init_uniform(&mut ev, dims, width, height, &mut rng).unwrap();
        for _ in 0..16 {
            let (i, j) = lattice.pick_site(&mut rng);
            let (ni, nj) = lattice.pick_neighbor(i, j, &mut rng);
            prop_assert!((ni, nj) != (i, j));
            let wrap_adjacent = |a: usize, b: usize, len: usize| {
                (a + 1) % len == b || (b + 1) % len == a
            };
            let adjacent = (j == nj && wrap_adjacent(i, ni, width))
                || (i == ni && wrap_adjacent(j, nj, height));
            prop_assert!(adjacent, "({i},{j}) -> ({ni},{nj}) is not a lattice edge");
        }
    }

    #[test]
    fn relative_std_is_rotation_invariant(
        seed in any::<u64>(),
        width in 2usize..40,
        offset in 0usize..40,
    ) {
        let domain = ObjectiveSpec::default_benchmark();
        let mut ev = BudgetedEvaluator::new(domain.clone(), width as u64 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lattice =
            LatticeState::init_uniform(&mut ev, LatticeDims::One, width, 1, &mut rng).unwrap();
        let before = lattice.relative_std();
        let cells = lattice.cells().to_vec();
        for i in 0..width {
            let value = cells[(i + offset) % width];
            lattice.set_cell(i, 0, value, domain.raw_value(value));
        }
        prop_assert!((lattice.relative_std() - before).abs() <= 1e-12);
    }

    #[test]
    fn every_algorithm_is_deterministic_per_seed(seed in any::<u64>(), pick in 0usize..6) {
        let variation = VariationParams::default();
        let algorithm = match pick {
            0 => AlgorithmConfig::Ising(IsingConfig {
                dims: LatticeDims::Two,
                width: 4,
                height: 4,
                beta: 100.0,
                variation,
            }),
            1 => AlgorithmConfig::Cellular(CellularConfig {
                dims: LatticeDims::Two,
                width: 4,
                height: 4,
                accept_worse_prob: 0.1,
                variation,
            }),
            2 => AlgorithmConfig::SimAnnealing(AnnealingConfig::default()),
            3 => AlgorithmConfig::Mutation(MutationConfig::default()),
            4 => AlgorithmConfig::Mixture(MixtureConfig { pop_size: 20, keep_prob: 0.1 }),
            _ => AlgorithmConfig::RandomSearch,
        };
        let mut results = Vec::new();
        for _ in 0..2 {
            let mut ev = BudgetedEvaluator::new(ObjectiveSpec::default_benchmark(), 120);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            results.push(algorithm.run(&mut ev, &CATALOG, &mut rng).unwrap());
        }
        prop_assert_eq!(&results[0], &results[1]);
        prop_assert_eq!(results[0].evals_used, 120);
    }
}
