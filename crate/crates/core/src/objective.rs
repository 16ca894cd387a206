//! Integer benchmark function, budgeted evaluation, and the local-minima
//! catalog used as ground truth by experiments and tests.

use std::collections::HashSet;
use std::io::{self, Write};

use thiserror::Error;

use crate::csvfmt::sci;
use crate::error::ConfigError;

/// Inclusive lower edge of the default search domain.
pub const DEFAULT_DOMAIN_LO: i64 = 0;
/// Exclusive upper edge of the default search domain.
pub const DEFAULT_DOMAIN_HI: i64 = 100_000;
/// Registry id of the default benchmark function.
pub const INT_SINE_ID: &str = "int-sine";

/// The benchmark objective `f(x) = |sin((x + 1) / 100)|`, evaluated on
/// integers.
///
/// Its exact zeros sit at `x = 100k*pi - 1`, which is never an integer for
/// `k != 0`, and `k = 0` gives `x = -1`, one step outside the default domain.
/// Every reachable candidate therefore has a strictly positive value, and the
/// landscape is a dense comb of unequally deep local minima.
pub fn int_sine(x: i64) -> f64 {
    (((x + 1) as f64) / 100.0).sin().abs()
}

type RawFn = fn(i64) -> f64;

fn registry_lookup(id: &str) -> Option<RawFn> {
    match id {
        INT_SINE_ID => Some(int_sine),
        _ => None,
    }
}

/// An integer objective together with its half-open search domain
/// `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    lo: i64,
    hi: i64,
    id: String,
    raw: RawFn,
}

impl PartialEq for ObjectiveSpec {
    fn eq(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.id == other.id
    }
}

impl Eq for ObjectiveSpec {}

impl ObjectiveSpec {
    /// Looks up `id` in the objective registry and pairs it with the domain
    /// `[lo, hi)`.
    pub fn new(id: &str, lo: i64, hi: i64) -> Result<Self, ConfigError> {
        if lo >= hi {
            return Err(ConfigError::EmptyDomain { lo, hi });
        }
        let raw = registry_lookup(id).ok_or_else(|| ConfigError::UnknownObjective(id.into()))?;
        Ok(Self { lo, hi, id: id.into(), raw })
    }

    /// The benchmark configuration: `int-sine` on `[0, 100000)`.
    pub fn default_benchmark() -> Self {
        Self::new(INT_SINE_ID, DEFAULT_DOMAIN_LO, DEFAULT_DOMAIN_HI)
            .expect("default benchmark is registered")
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Number of integers in the domain.
    pub fn width(&self) -> u64 {
        (self.hi - self.lo) as u64
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x < self.hi
    }

    /// Clamps `x` onto the closed integer range `[lo, hi - 1]`.
    pub fn clamp(&self, x: i64) -> i64 {
        x.clamp(self.lo, self.hi - 1)
    }

    /// Evaluates the objective without budget accounting or domain checks.
    ///
    /// Tests and the catalog enumerator use this directly; optimizers must go
    /// through a [`BudgetedEvaluator`] instead.
    pub fn raw_value(&self, x: i64) -> f64 {
        (self.raw)(x)
    }
}

/// Errors surfaced by [`BudgetedEvaluator::evaluate`].
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("evaluation budget of {budget} is exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("candidate {x} lies outside the domain [{lo}, {hi})")]
    DomainViolation { x: i64, lo: i64, hi: i64 },
}

/// Wraps an [`ObjectiveSpec`] and meters every call against a fixed
/// evaluation budget.
///
/// The budget counts calls, not distinct candidates: re-evaluating a value
/// costs as much as evaluating a fresh one. A failed call consumes nothing.
#[derive(Debug, Clone)]
pub struct BudgetedEvaluator {
    spec: ObjectiveSpec,
    budget: u64,
    used: u64,
}

impl BudgetedEvaluator {
    pub fn new(spec: ObjectiveSpec, budget: u64) -> Self {
        Self { spec, budget, used: 0 }
    }

    /// Evaluates `f(x)`, consuming one unit of budget on success.
    ///
    /// An exhausted budget is reported before any domain check, so callers
    /// can rely on `BudgetExhausted` as the sole termination signal.
    pub fn evaluate(&mut self, x: i64) -> Result<f64, EvalError> {
        if self.used >= self.budget {
            return Err(EvalError::BudgetExhausted { budget: self.budget });
        }
        if !self.spec.contains(x) {
            return Err(EvalError::DomainViolation { x, lo: self.spec.lo, hi: self.spec.hi });
        }
        self.used += 1;
        Ok(self.spec.raw_value(x))
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.budget
    }
}

/// One interior local minimum of an objective: strictly lower than both
/// integer neighbors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMinimum {
    /// 1-based position in the catalog ordered by ascending value.
    pub rank: usize,
    pub argmin: i64,
    pub value: f64,
}

/// Every interior local minimum of an objective, ranked by ascending value.
///
/// Built by brute force over the full domain, the catalog serves as ground
/// truth: experiments measure how close optimizers get to `best()` and how
/// many of `top_k` an ensemble discovers.
#[derive(Debug, Clone)]
pub struct MinimaCatalog {
    domain: ObjectiveSpec,
    minima: Vec<LocalMinimum>,
    argmin_set: HashSet<i64>,
}

impl MinimaCatalog {
    /// Scans every interior point of the domain and collects all `x` with
    /// `f(x) < f(x - 1)` and `f(x) < f(x + 1)`.
    ///
    /// Domain boundaries are excluded because one of their neighbors is not
    /// comparable. Requires a domain of at least 3 integers.
    pub fn enumerate(domain: &ObjectiveSpec) -> Self {
        assert!(domain.width() >= 3, "catalog needs at least 3 domain points");
        let mut minima = Vec::new();
        let mut prev = domain.raw_value(domain.lo);
        let mut here = domain.raw_value(domain.lo + 1);
        for x in domain.lo + 1..domain.hi - 1 {
            let next = domain.raw_value(x + 1);
            if here < prev && here < next {
                minima.push(LocalMinimum { rank: 0, argmin: x, value: here });
            }
            prev = here;
            here = next;
        }
        minima.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.argmin.cmp(&b.argmin)));
        for (idx, m) in minima.iter_mut().enumerate() {
            m.rank = idx + 1;
        }
        let argmin_set = minima.iter().map(|m| m.argmin).collect();
        Self { domain: domain.clone(), minima, argmin_set }
    }

    pub fn domain(&self) -> &ObjectiveSpec {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.minima.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minima.is_empty()
    }

    /// All minima, ordered by ascending value (rank order).
    pub fn minima(&self) -> &[LocalMinimum] {
        &self.minima
    }

    /// The global minimum over the interior, if any minimum exists.
    pub fn best(&self) -> Option<&LocalMinimum> {
        self.minima.first()
    }

    /// The `k` lowest-valued minima.
    pub fn top_k(&self, k: usize) -> Result<&[LocalMinimum], ConfigError> {
        if k > self.minima.len() {
            return Err(ConfigError::KTooLarge { k, len: self.minima.len() });
        }
        Ok(&self.minima[..k])
    }

    /// Mean objective value across all local minima.
    pub fn mean_value(&self) -> f64 {
        assert!(!self.minima.is_empty(), "mean of an empty catalog");
        self.minima.iter().map(|m| m.value).sum::<f64>() / self.minima.len() as f64
    }

    /// Whether `x` is one of the cataloged argmins.
    pub fn contains_argmin(&self, x: i64) -> bool {
        self.argmin_set.contains(&x)
    }

    /// Writes the catalog as `rank,argmin,value` rows, rank ascending.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "rank,argmin,value")?;
        for m in &self.minima {
            writeln!(out, "{},{},{}", m.rank, m.argmin, sci(m.value))?;
        }
        Ok(())
    }
}
