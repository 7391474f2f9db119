//! Sparse transport plans, feasible initializers, and optimality metrics.

use std::collections::BTreeMap;

use crate::error::{OtError, Result};
use crate::problem::{Cost, DiscreteMarginal, OtInstance};

/// Entries below this are dropped after every plan update; solutions of the
/// transportation LP are sparse and sub-threshold mass is rounding noise.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Sparse nonnegative coupling in coordinate form. Stored masses are strictly
/// positive; an absent cell carries zero mass.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransportPlan {
    n: usize,
    entries: BTreeMap<(u32, u32), f64>,
}

impl TransportPlan {
    pub fn empty(n: usize) -> Self {
        Self { n, entries: BTreeMap::new() }
    }

    /// Builds a plan from `(row, col, mass)` triples, dropping zeros.
    pub fn from_entries(n: usize, triples: impl IntoIterator<Item = (u32, u32, f64)>) -> Result<Self> {
        let mut plan = Self::empty(n);
        for (i, j, mass) in triples {
            if (i as usize) >= n || (j as usize) >= n {
                return Err(OtError::DimensionMismatch(format!(
                    "cell ({i},{j}) outside {n}x{n} plan"
                )));
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(OtError::NegativeEntry { index: i as usize * n + j as usize, value: mass });
            }
            if mass > 0.0 {
                *plan.entries.entry((i, j)).or_insert(0.0) += mass;
            }
        }
        Ok(plan)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (strictly positive) cells.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn mass_at(&self, i: u32, j: u32) -> f64 {
        self.entries.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.entries.iter().map(|(&(i, j), &m)| (i, j, m))
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Inserts a cell, dropping masses at or below the prune threshold.
    pub fn insert(&mut self, i: u32, j: u32, mass: f64) {
        debug_assert!((i as usize) < self.n && (j as usize) < self.n);
        if mass > PRUNE_THRESHOLD {
            self.entries.insert((i, j), mass);
        } else {
            self.entries.remove(&(i, j));
        }
    }

    pub fn remove(&mut self, i: u32, j: u32) -> Option<f64> {
        self.entries.remove(&(i, j))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for (&(i, _), &m) in &self.entries {
            sums[i as usize] += m;
        }
        sums
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for (&(_, j), &m) in &self.entries {
            sums[j as usize] += m;
        }
        sums
    }

    /// Cells where the two plans store different masses.
    pub fn support_difference(&self, other: &TransportPlan) -> Vec<(u32, u32)> {
        let mut cells = Vec::new();
        let mut left = self.entries.iter().peekable();
        let mut right = other.entries.iter().peekable();
        loop {
            match (left.peek(), right.peek()) {
                (Some((&ka, &va)), Some((&kb, &vb))) => {
                    if ka < kb {
                        cells.push(ka);
                        left.next();
                    } else if kb < ka {
                        cells.push(kb);
                        right.next();
                    } else {
                        if va != vb {
                            cells.push(ka);
                        }
                        left.next();
                        right.next();
                    }
                }
                (Some((&ka, _)), None) => {
                    cells.push(ka);
                    left.next();
                }
                (None, Some((&kb, _))) => {
                    cells.push(kb);
                    right.next();
                }
                (None, None) => break,
            }
        }
        cells
    }
}

/// Product coupling `x0 = r1 r2^T / total`: dense support, feasible for any
/// balanced instance.
pub fn initial_plan_product(instance: &OtInstance) -> Result<TransportPlan> {
    let n = instance.n();
    let total = instance.total_mass();
    if total <= 0.0 {
        return Err(OtError::InvalidParameter("instance carries no mass".into()));
    }
    let mut plan = TransportPlan::empty(n);
    for (i, &a) in instance.r1().weights().iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in instance.r2().weights().iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            plan.entries.insert((i as u32, j as u32), a * b / total);
        }
    }
    Ok(plan)
}

/// North-west corner coupling over the given index order: feasible with at
/// most `2n - 1` nonzeros, so it avoids the dense start at large n.
pub fn initial_plan_northwest(instance: &OtInstance) -> Result<TransportPlan> {
    let plan = northwest_plan(instance.n(), instance.r1().weights(), instance.r2().weights())?;
    Ok(plan)
}

pub(crate) fn northwest_plan(n: usize, r1: &[f64], r2: &[f64]) -> Result<TransportPlan> {
    if r1.len() != n || r2.len() != n {
        return Err(OtError::DimensionMismatch("marginal lengths differ from plan size".into()));
    }
    let mut plan = TransportPlan::empty(n);
    let mut i = 0;
    let mut j = 0;
    let mut remaining_row = r1.first().copied().unwrap_or(0.0);
    let mut remaining_col = r2.first().copied().unwrap_or(0.0);
    while i < n && j < n {
        let move_mass = remaining_row.min(remaining_col);
        if move_mass > 0.0 {
            plan.entries.insert((i as u32, j as u32), move_mass);
        }
        remaining_row -= move_mass;
        remaining_col -= move_mass;
        // Advance whichever side is exhausted; on ties advance the row so a
        // fresh cell is opened at most 2n - 1 times.
        if remaining_row <= remaining_col {
            i += 1;
            if i < n {
                remaining_row = r1[i];
            }
        } else {
            j += 1;
            if j < n {
                remaining_col = r2[j];
            }
        }
    }
    Ok(plan)
}

/// Transport cost `sum_ij C_ij x_ij` over the stored support.
pub fn objective(plan: &TransportPlan, cost: &Cost) -> f64 {
    plan.iter().map(|(i, j, m)| cost.at(i as usize, j as usize) * m).sum()
}

/// `||X 1 - r1||_2 + ||X^T 1 - r2||_2`.
pub fn feasibility_error(plan: &TransportPlan, r1: &DiscreteMarginal, r2: &DiscreteMarginal) -> f64 {
    let rows = plan.row_sums();
    let cols = plan.col_sums();
    let row_err: f64 = rows
        .iter()
        .zip(r1.weights())
        .map(|(s, r)| (s - r) * (s - r))
        .sum::<f64>()
        .sqrt();
    let col_err: f64 = cols
        .iter()
        .zip(r2.weights())
        .map(|(s, r)| (s - r) * (s - r))
        .sum::<f64>()
        .sqrt();
    row_err + col_err
}
