//! Proposal moves shared by the lattice optimizers: pairwise averaging and
//! Gaussian integer steps.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::ConfigError;
use crate::objective::ObjectiveSpec;

/// Parameters of the two proposal moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams {
    /// Standard deviation of the Gaussian step, in domain units.
    pub mutation_std: f64,
    /// Probability that a proposal is the pair average rather than a
    /// Gaussian step off the current value.
    pub mix_probability: f64,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self { mutation_std: 100.0, mix_probability: 0.5 }
    }
}

impl VariationParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.mutation_std.is_finite() && self.mutation_std > 0.0) {
            return Err(ConfigError::NotPositive {
                name: "mutation_std",
                value: self.mutation_std,
            });
        }
        if !(0.0..=1.0).contains(&self.mix_probability) || self.mix_probability.is_nan() {
            return Err(ConfigError::BadProbability {
                name: "mix_probability",
                value: self.mix_probability,
            });
        }
        Ok(())
    }
}

/// Integer midpoint of two candidates, rounded toward negative infinity.
///
/// Flooring keeps the result exact in integer arithmetic; for two in-domain
/// parents the child always lies between them, so it needs no clamping.
pub fn average_mix(a: i64, b: i64) -> i64 {
    (a + b).div_euclid(2)
}

/// Gaussian step off `x`: draws `normal(mean = x, std = mutation_std)`,
/// rounds to the nearest integer, and clamps into the domain.
pub fn normal_step<R: Rng + ?Sized>(
    x: i64,
    params: &VariationParams,
    domain: &ObjectiveSpec,
    rng: &mut R,
) -> i64 {
    let normal = Normal::new(x as f64, params.mutation_std)
        .expect("mutation_std validated as positive and finite");
    domain.clamp(normal.sample(rng).round() as i64)
}

/// One lattice proposal: with `mix_probability` the average of site and
/// neighbor, otherwise a Gaussian step off the site.
///
/// Draws exactly one uniform for the branch choice, plus the Gaussian draw
/// when that branch is taken.
pub fn propose<R: Rng + ?Sized>(
    site: i64,
    neighbor: i64,
    params: &VariationParams,
    domain: &ObjectiveSpec,
    rng: &mut R,
) -> i64 {
    if rng.random::<f64>() < params.mix_probability {
        average_mix(site, neighbor)
    } else {
        normal_step(site, params, domain, rng)
    }
}
