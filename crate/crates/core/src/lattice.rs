//! Ring and torus populations of integer candidates with cached objective
//! values.

use std::fmt;
use std::io::{self, Write};

use rand::Rng;

use crate::objective::{BudgetedEvaluator, EvalError, ObjectiveSpec};

/// Lattice dimensionality: a 1D ring or a 2D torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeDims {
    One,
    Two,
}

impl LatticeDims {
    pub fn as_u8(self) -> u8 {
        match self {
            LatticeDims::One => 1,
            LatticeDims::Two => 2,
        }
    }
}

impl fmt::Display for LatticeDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// A population arranged on a ring (`dims = One`, height 1) or a torus with
/// wrap-around edges (`dims = Two`).
///
/// Cells store integer candidates; `quals` caches the objective value of each
/// cell so repeated acceptance decisions never re-spend budget. Storage is
/// row-major: flat index `j * width + i` for column `i`, row `j`.
#[derive(Debug, Clone)]
pub struct LatticeState {
    dims: LatticeDims,
    width: usize,
    height: usize,
    cells: Vec<i64>,
    quals: Vec<f64>,
    domain: ObjectiveSpec,
}

impl LatticeState {
    /// Fills a fresh lattice with uniform draws from the domain, evaluating
    /// every cell through `ev`.
    ///
    /// Initialization spends exactly `width * height` budget. Fails with
    /// `BudgetExhausted` up front when the remaining budget cannot cover
    /// that, leaving `ev` untouched; a lattice is useless if no update could
    /// ever follow, so callers enforce strictly larger budgets themselves.
    pub fn init_uniform<R: Rng + ?Sized>(
        ev: &mut BudgetedEvaluator,
        dims: LatticeDims,
        width: usize,
        height: usize,
        rng: &mut R,
    ) -> Result<Self, EvalError> {
        assert!(width >= 1 && height >= 1, "lattice sides must be at least 1");
        assert!(
            dims == LatticeDims::Two || height == 1,
            "a one-dimensional lattice must have height 1"
        );
        let size = width * height;
        if (ev.remaining() as u128) < size as u128 {
            return Err(EvalError::BudgetExhausted { budget: ev.budget() });
        }
        let domain = ev.spec().clone();
        let mut cells = Vec::with_capacity(size);
        let mut quals = Vec::with_capacity(size);
        for _ in 0..size {
            let x = rng.random_range(domain.lo()..domain.hi());
            let q = ev.evaluate(x).expect("uniform draw is in domain and within budget");
            cells.push(x);
            quals.push(q);
        }
        Ok(Self { dims, width, height, cells, quals, domain })
    }

    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn domain(&self) -> &ObjectiveSpec {
        &self.domain
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.width && j < self.height);
        j * self.width + i
    }

    pub fn cell(&self, i: usize, j: usize) -> i64 {
        self.cells[self.idx(i, j)]
    }

    pub fn qual(&self, i: usize, j: usize) -> f64 {
        self.quals[self.idx(i, j)]
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    /// Cached objective values in row-major order.
    pub fn quals(&self) -> &[f64] {
        &self.quals
    }

    /// Overwrites one site, keeping the value cache coherent.
    pub fn set_cell(&mut self, i: usize, j: usize, value: i64, qual: f64) {
        debug_assert_eq!(
            qual.to_bits(),
            self.domain.raw_value(value).to_bits(),
            "qual cache must equal f(value)"
        );
        let idx = self.idx(i, j);
        self.cells[idx] = value;
        self.quals[idx] = qual;
    }

    /// Uniformly random site coordinates.
    pub fn pick_site<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let i = rng.random_range(0..self.width);
        let j = if self.height > 1 { rng.random_range(0..self.height) } else { 0 };
        (i, j)
    }

    /// The neighbors of site `(i, j)` under wrap-around boundaries: left and
    /// right on a ring, plus up and down on a torus.
    pub fn neighbor_sites(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        assert!(i < self.width && j < self.height);
        let left = ((i + self.width - 1) % self.width, j);
        let right = ((i + 1) % self.width, j);
        match self.dims {
            LatticeDims::One => vec![left, right],
            LatticeDims::Two => {
                let up = (i, (j + self.height - 1) % self.height);
                let down = (i, (j + 1) % self.height);
                vec![left, right, up, down]
            }
        }
    }

    /// Uniformly random neighbor of `(i, j)`: one of 2 on a ring, one of 4
    /// on a torus.
    pub fn pick_neighbor<R: Rng + ?Sized>(&self, i: usize, j: usize, rng: &mut R) -> (usize, usize) {
        assert!(i < self.width && j < self.height);
        let choice = match self.dims {
            LatticeDims::One => rng.random_range(0..2),
            LatticeDims::Two => rng.random_range(0..4),
        };
        match choice {
            0 => ((i + self.width - 1) % self.width, j),
            1 => ((i + 1) % self.width, j),
            2 => (i, (j + self.height - 1) % self.height),
            _ => (i, (j + 1) % self.height),
        }
    }

    /// Site of the lowest cached value; ties go to the smallest flat index.
    pub fn argmin_site(&self) -> (usize, usize) {
        let mut best = 0;
        for idx in 1..self.quals.len() {
            if self.quals[idx] < self.quals[best] {
                best = idx;
            }
        }
        (best % self.width, best / self.width)
    }

    /// Population standard deviation of the cell values, divided by the
    /// domain width.
    ///
    /// A uniformly random lattice sits near `1/sqrt(12) ~ 0.2887`; a fully
    /// converged one is near 0.
    pub fn relative_std(&self) -> f64 {
        let n = self.cells.len() as f64;
        let mean = self.cells.iter().map(|&c| c as f64).sum::<f64>() / n;
        let var = self
            .cells
            .iter()
            .map(|&c| {
                let d = c as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        var.sqrt() / self.domain.width() as f64
    }

    /// Copies the current grid into a [`Snapshot`] tagged with the update
    /// step and the acceptance temperature that produced it.
    pub fn take_snapshot(&self, step: u64, beta: f64) -> Snapshot {
        Snapshot {
            step,
            beta,
            width: self.width,
            height: self.height,
            cells: self.cells.clone(),
        }
    }
}

/// A frozen copy of a lattice's cells at one moment of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Update steps completed since initialization (0 = freshly initialized).
    pub step: u64,
    /// Acceptance inverse temperature of the run that produced this grid.
    pub beta: f64,
    pub width: usize,
    pub height: usize,
    /// Row-major cell values.
    pub cells: Vec<i64>,
}

impl Snapshot {
    pub fn cell(&self, i: usize, j: usize) -> i64 {
        self.cells[j * self.width + i]
    }
}

/// Writes snapshots as `beta,step,i,j,value` rows, one row per cell, cells in
/// row-major order within each snapshot.
pub fn write_snapshots_csv<W: Write>(snapshots: &[Snapshot], mut out: W) -> io::Result<()> {
    writeln!(out, "beta,step,i,j,value")?;
    for snap in snapshots {
        for j in 0..snap.height {
            for i in 0..snap.width {
                writeln!(out, "{},{},{},{},{}", snap.beta, snap.step, i, j, snap.cell(i, j))?;
            }
        }
    }
    Ok(())
}
