//! Problem data model: marginals, transport costs, and instances.

use crate::error::{OtError, Result};

/// Relative tolerance for marginal totals and normalization checks.
pub const TOTAL_TOL: f64 = 1e-12;

/// A nonnegative weight vector with a declared total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMarginal {
    weights: Vec<f64>,
    total: f64,
}

impl DiscreteMarginal {
    /// Builds a marginal whose entries must sum to `total` within 1e-12 relative.
    pub fn new(weights: Vec<f64>, total: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(OtError::InvalidParameter("marginal must have n >= 1".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(OtError::NegativeEntry { index: i, value: w });
            }
        }
        let sum: f64 = weights.iter().sum();
        let scale = total.abs().max(1.0);
        if (sum - total).abs() > TOTAL_TOL * scale {
            return Err(OtError::UnbalancedTotals { left: sum, right: total });
        }
        Ok(Self { weights, total })
    }

    /// A probability marginal (total mass 1).
    pub fn probability(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights, 1.0)
    }

    /// Scales an arbitrary nonnegative vector to total mass 1.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(OtError::InvalidParameter("weights sum to zero".into()));
        }
        for w in &mut weights {
            *w /= sum;
        }
        Self::new(weights, 1.0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

/// Dense `n x n` nonnegative cost matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<f64>,
    normalized: bool,
    scale: f64,
}

impl CostMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(OtError::DimensionMismatch(format!(
                "cost matrix needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for (i, &c) in entries.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(OtError::NegativeEntry { index: i, value: c });
            }
        }
        Ok(Self { n, entries, normalized: false, scale: 1.0 })
    }

    /// Divides all entries by the maximum so the largest cost is exactly 1.
    /// Returns the matrix unchanged when every entry is zero.
    pub fn into_normalized(mut self) -> Self {
        let max = self.entries.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            for c in &mut self.entries {
                *c /= max;
            }
            self.normalized = true;
            self.scale = max;
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Divisor applied by normalization (1.0 when untouched). Gaps measured on
    /// the normalized matrix multiply by this to recover raw-cost units.
    pub fn normalization_scale(&self) -> f64 {
        self.scale
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(0.0, f64::max)
    }
}

/// Cost defined implicitly by two point sets: `|src_i - dst_j|^p`, divided by
/// the maximum pairwise value. Avoids the dense `n^2` footprint for large n.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCost {
    dim: usize,
    src: Vec<f64>,
    dst: Vec<f64>,
    p_exp: f64,
    inv_max: f64,
    raw_max: f64,
}

impl PointCost {
    pub fn new(dim: usize, src: Vec<f64>, dst: Vec<f64>, p_exp: f64) -> Result<Self> {
        if dim == 0 || src.is_empty() || dst.is_empty() {
            return Err(OtError::InvalidParameter("empty point set".into()));
        }
        if src.len() % dim != 0 || dst.len() % dim != 0 {
            return Err(OtError::DimensionMismatch("point buffer not a multiple of dim".into()));
        }
        if src.len() != dst.len() {
            return Err(OtError::DimensionMismatch("point sets differ in size".into()));
        }
        let raw_max = max_pairwise_cost(dim, &src, &dst, p_exp);
        let inv_max = if raw_max > 0.0 { 1.0 / raw_max } else { 1.0 };
        Ok(Self { dim, src, dst, p_exp, inv_max, raw_max })
    }

    pub fn n(&self) -> usize {
        self.src.len() / self.dim
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        let mut sq = 0.0;
        for k in 0..self.dim {
            let d = self.src[i * self.dim + k] - self.dst[j * self.dim + k];
            sq += d * d;
        }
        let raw = if self.p_exp == 2.0 { sq } else { sq.sqrt().powf(self.p_exp) };
        raw * self.inv_max
    }

    pub fn raw_max(&self) -> f64 {
        self.raw_max
    }
}

fn max_pairwise_cost(dim: usize, src: &[f64], dst: &[f64], p_exp: f64) -> f64 {
    let n = src.len() / dim;
    let m = dst.len() / dim;
    if dim == 1 {
        // The extremes decide the diameter; no need for the n^2 scan.
        let (smin, smax) = min_max(src);
        let (dmin, dmax) = min_max(dst);
        let diam = (smax - dmin).max(dmax - smin).max(0.0);
        return diam.powf(p_exp);
    }
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..m {
            let mut sq = 0.0;
            for k in 0..dim {
                let d = src[i * dim + k] - dst[j * dim + k];
                sq += d * d;
            }
            best = best.max(sq);
        }
    }
    best.sqrt().powf(p_exp)
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in xs {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}

/// Transport cost source: dense matrix or lazily evaluated point distances.
#[derive(Debug, Clone, PartialEq)]
pub enum Cost {
    Dense(CostMatrix),
    Points(PointCost),
}

impl Cost {
    pub fn n(&self) -> usize {
        match self {
            Cost::Dense(c) => c.n(),
            Cost::Points(c) => c.n(),
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        match self {
            Cost::Dense(c) => c.at(i, j),
            Cost::Points(c) => c.at(i, j),
        }
    }

    /// Divisor that maps normalized costs back to raw units.
    pub fn normalization_scale(&self) -> f64 {
        match self {
            Cost::Dense(c) => c.normalization_scale(),
            Cost::Points(c) => c.raw_max(),
        }
    }

    /// Materializes the dense matrix (used by the Sinkhorn baseline).
    pub fn to_dense(&self) -> CostMatrix {
        match self {
            Cost::Dense(c) => c.clone(),
            Cost::Points(p) => {
                let n = p.n();
                let mut entries = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        entries.push(p.at(i, j));
                    }
                }
                CostMatrix { n, entries, normalized: true, scale: p.raw_max() }
            }
        }
    }
}

impl From<CostMatrix> for Cost {
    fn from(c: CostMatrix) -> Self {
        Cost::Dense(c)
    }
}

/// A balanced discrete transport problem.
#[derive(Debug, Clone, PartialEq)]
pub struct OtInstance {
    cost: Cost,
    r1: DiscreteMarginal,
    r2: DiscreteMarginal,
}

impl OtInstance {
    pub fn new(cost: impl Into<Cost>, r1: DiscreteMarginal, r2: DiscreteMarginal) -> Result<Self> {
        let cost = cost.into();
        let n = cost.n();
        if r1.len() != n || r2.len() != n {
            return Err(OtError::DimensionMismatch(format!(
                "cost is {n}x{n} but marginals have lengths {} and {}",
                r1.len(),
                r2.len()
            )));
        }
        let scale = r1.total().abs().max(1.0);
        if (r1.total() - r2.total()).abs() > TOTAL_TOL * scale {
            return Err(OtError::UnbalancedTotals { left: r1.total(), right: r2.total() });
        }
        Ok(Self { cost, r1, r2 })
    }

    pub fn n(&self) -> usize {
        self.cost.n()
    }

    pub fn cost(&self) -> &Cost {
        &self.cost
    }

    pub fn r1(&self) -> &DiscreteMarginal {
        &self.r1
    }

    pub fn r2(&self) -> &DiscreteMarginal {
        &self.r2
    }

    pub fn total_mass(&self) -> f64 {
        self.r1.total()
    }
}
