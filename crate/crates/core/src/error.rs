//! Configuration errors reported before any optimization work starts.

use thiserror::Error;

/// Rejects invalid objective, lattice, algorithm, or plan parameters.
///
/// Every public constructor and runner validates its inputs and returns one
/// of these instead of panicking, so a CLI can surface the message verbatim.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown objective id `{0}`")]
    UnknownObjective(String),

    #[error("domain [{lo}, {hi}) is empty")]
    EmptyDomain { lo: i64, hi: i64 },

    #[error("budget {budget} is too small: this configuration needs at least {needed} evaluations")]
    BudgetTooSmall { budget: u64, needed: u64 },

    #[error("lattice shape {width}x{height} is invalid: both sides must be at least 1 and the lattice needs at least 2 sites")]
    BadLatticeShape { width: usize, height: usize },

    #[error("a one-dimensional lattice must have height 1, got {height}")]
    BadRingShape { height: usize },

    #[error("{name} must be a probability in [0, 1], got {value}")]
    BadProbability { name: &'static str, value: f64 },

    #[error("{name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },

    #[error("beta must be non-negative and finite, got {0}")]
    BadBeta(f64),

    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),

    #[error("a plan must request at least one run")]
    NoRuns,

    #[error("checkpoint schedule must be non-empty, strictly increasing, positive, and end within the budget")]
    BadCheckpointSchedule,

    #[error("phase sweep step schedules must be strictly increasing and end within the step count")]
    BadStepSchedule,

    #[error("all plans in a sweep must share one checkpoint schedule")]
    MismatchedSchedules,

    #[error("k={k} exceeds the catalog size {len}")]
    KTooLarge { k: usize, len: usize },
}
