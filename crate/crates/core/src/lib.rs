//! Lattice-structured evolutionary optimization on a deceptive integer benchmark.
//!
//! The crate centers on a population of integer candidates arranged on a ring
//! or torus. Each update picks a site and one of its neighbors, proposes a new
//! candidate by either averaging the pair or perturbing the site with Gaussian
//! noise, and accepts the proposal with a Metropolis-style probability
//! controlled by an inverse temperature `beta`. Alongside it live five
//! reference algorithms (cellular with fixed acceptance, simulated annealing,
//! greedy mutation, panmictic mixture, random search), a brute-force catalog
//! of every local minimum of the benchmark, and a harness that replays seeded
//! experiment plans and serializes the results as CSV.
//!
//! All randomness flows through caller-supplied [`rand::Rng`] instances; the
//! harness derives one `ChaCha8Rng` per run from a base seed, so every result
//! in this crate is reproducible bit for bit.

pub mod csvfmt;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod objective;
pub mod optimizers;
pub mod variation;

pub use error::ConfigError;
pub use lattice::{LatticeDims, LatticeState, Snapshot};
pub use objective::{BudgetedEvaluator, EvalError, LocalMinimum, MinimaCatalog, ObjectiveSpec};
pub use optimizers::{
    acceptance_probability, AcceptanceRule, AlgorithmConfig, AnnealingConfig, CellularConfig,
    IsingConfig, MixtureConfig, MutationConfig, RunResult, TracePoint,
};
pub use variation::VariationParams;
