//! Randomized working-set selection rules.
//!
//! A working set is the subset of plan cells a single iteration is allowed
//! to change. Selection is the only randomized part of a run; every rule is
//! a pure function of its configuration and the caller's RNG state.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{OtError, Result};
use crate::rng::{stream_rng, STREAM_SELECT};
use crate::trajectory::SelectionKind;

/// Parameters for all selection rules.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SelectorConfig {
    /// Problem size (plans are n x n).
    pub n: usize,
    /// Cardinality of a uniform working set; at least `2n` (constraint rank + 1).
    pub uniform_size: usize,
    /// Band width `p` in `[3, n]`.
    pub band_width: usize,
    /// Submatrix side `m` in `[2, n]`.
    pub submatrix_dim: usize,
    /// Probability of drawing a band instead of a submatrix.
    pub band_probability: f64,
    /// Acceleration interval `T >= 2`.
    pub accel_interval: u64,
    /// Seed for the selection stream.
    pub seed: u64,
}

impl SelectorConfig {
    /// Defaults scaled from n: `m = ceil(sqrt(10 n))`, `p = floor(m^2 / n)`
    /// clamped to `[3, n]`, `s = 0.1`, `T = 10`, `l = m^2` capped at `n^2`.
    pub fn defaults_for(n: usize, seed: u64) -> Self {
        let m = ((10.0 * n as f64).sqrt().ceil() as usize).clamp(2, n.max(2));
        let p = (m * m / n.max(1)).clamp(3, n.max(3));
        Self {
            n,
            uniform_size: (m * m).clamp(2 * n, n * n),
            band_width: p,
            submatrix_dim: m,
            band_probability: 0.1,
            accel_interval: 10,
            seed,
        }
    }

    /// True when the default band width had to be clamped up to 3.
    pub fn band_width_clamped(n: usize) -> bool {
        let m = ((10.0 * n as f64).sqrt().ceil() as usize).clamp(2, n.max(2));
        m * m / n.max(1) < 3
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(OtError::InvalidParameter("n must be positive".into()));
        }
        if self.uniform_size < 2 * n || self.uniform_size > n * n {
            return Err(OtError::InvalidParameter(format!(
                "uniform size {} outside [2n, n^2] = [{}, {}]",
                self.uniform_size,
                2 * n,
                n * n
            )));
        }
        if self.band_width < 3 || self.band_width > n {
            return Err(OtError::InvalidParameter(format!(
                "band width {} outside [3, {}]",
                self.band_width, n
            )));
        }
        if self.submatrix_dim < 2 || self.submatrix_dim > n {
            return Err(OtError::InvalidParameter(format!(
                "submatrix side {} outside [2, {}]",
                self.submatrix_dim, n
            )));
        }
        if !(0.0..=1.0).contains(&self.band_probability) {
            return Err(OtError::InvalidParameter(format!(
                "band probability {} outside [0, 1]",
                self.band_probability
            )));
        }
        if self.accel_interval < 2 {
            return Err(OtError::InvalidParameter("acceleration interval must be >= 2".into()));
        }
        Ok(())
    }

    /// RNG bound to this selector's seed.
    pub fn rng(&self) -> ChaCha8Rng {
        stream_rng(self.seed, STREAM_SELECT)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum WsRepr {
    /// Sorted cell list (uniform and momentum draws).
    Cells(Vec<(u32, u32)>),
    /// Cyclic band of width p with independently permuted rows and columns.
    /// `row_pos[i]` is the unpermuted position of row i.
    Band { row_pos: Vec<u32>, col_pos: Vec<u32>, p: usize },
    /// Cartesian product of the selected rows and columns.
    Submatrix { rows: Vec<u32>, cols: Vec<u32>, row_in: Vec<bool>, col_in: Vec<bool> },
}

/// A set of plan cells an iteration may modify.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkingSet {
    n: usize,
    kind: SelectionKind,
    repr: WsRepr,
}

impl WorkingSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SelectionKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            WsRepr::Cells(cells) => cells.len(),
            WsRepr::Band { p, .. } => self.n * p,
            WsRepr::Submatrix { rows, cols, .. } => rows.len() * cols.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn contains(&self, i: u32, j: u32) -> bool {
        match &self.repr {
            WsRepr::Cells(cells) => cells.binary_search(&(i, j)).is_ok(),
            WsRepr::Band { row_pos, col_pos, p } => {
                band_member(row_pos[i as usize], col_pos[j as usize], self.n as u32, *p as u32)
            }
            WsRepr::Submatrix { row_in, col_in, .. } => row_in[i as usize] && col_in[j as usize],
        }
    }

    /// Materializes the cell list in lexicographic order.
    pub fn cells(&self) -> Vec<(u32, u32)> {
        let mut out = match &self.repr {
            WsRepr::Cells(cells) => cells.clone(),
            WsRepr::Band { .. } => {
                let mut cells = Vec::with_capacity(self.len());
                for i in 0..self.n as u32 {
                    for j in 0..self.n as u32 {
                        if self.contains(i, j) {
                            cells.push((i, j));
                        }
                    }
                }
                cells
            }
            WsRepr::Submatrix { rows, cols, .. } => {
                let mut cells = Vec::with_capacity(rows.len() * cols.len());
                for &i in rows {
                    for &j in cols {
                        cells.push((i, j));
                    }
                }
                cells
            }
        };
        out.sort_unstable();
        out
    }

    /// Rows of a submatrix working set (`None` for other kinds).
    pub fn submatrix_axes(&self) -> Option<(&[u32], &[u32])> {
        match &self.repr {
            WsRepr::Submatrix { rows, cols, .. } => Some((rows, cols)),
            _ => None,
        }
    }

    /// Builds an explicit working set from arbitrary cells (momentum draws
    /// and tests).
    pub fn from_cells(n: usize, kind: SelectionKind, mut cells: Vec<(u32, u32)>) -> Result<Self> {
        cells.sort_unstable();
        cells.dedup();
        if cells.is_empty() {
            return Err(OtError::EmptyWorkingSet);
        }
        if let Some(&(i, j)) = cells.iter().find(|&&(i, j)| i as usize >= n || j as usize >= n) {
            return Err(OtError::DimensionMismatch(format!("cell ({i},{j}) outside {n}x{n}")));
        }
        Ok(Self { n, kind, repr: WsRepr::Cells(cells) })
    }
}

/// Membership in the width-p cyclic band on unpermuted coordinates:
/// `(i - j) mod n < p`.
#[inline]
fn band_member(gi: u32, gj: u32, n: u32, p: u32) -> bool {
    (gi + n - gj) % n < p
}

/// Uniform random working set of `uniform_size` cells out of all n^2.
pub fn select_uniform(cfg: &SelectorConfig, rng: &mut ChaCha8Rng) -> Result<WorkingSet> {
    cfg.validate()?;
    let n = cfg.n;
    let l = cfg.uniform_size;
    let mut cells: Vec<(u32, u32)> = rand::seq::index::sample(rng, n * n, l)
        .into_iter()
        .map(|flat| ((flat / n) as u32, (flat % n) as u32))
        .collect();
    cells.sort_unstable();
    Ok(WorkingSet { n, kind: SelectionKind::Uniform, repr: WsRepr::Cells(cells) })
}

/// The unpermuted diagonal band of width p (identity row/column order).
pub fn band_pattern(n: usize, p: usize) -> Result<WorkingSet> {
    if n == 0 || p < 3 || p > n {
        return Err(OtError::InvalidParameter(format!("band width {p} outside [3, {n}]")));
    }
    let identity: Vec<u32> = (0..n as u32).collect();
    Ok(WorkingSet {
        n,
        kind: SelectionKind::Band,
        repr: WsRepr::Band { row_pos: identity.clone(), col_pos: identity, p },
    })
}

/// Band pattern with rows and columns independently uniformly permuted.
pub fn select_band(cfg: &SelectorConfig, rng: &mut ChaCha8Rng) -> Result<WorkingSet> {
    cfg.validate()?;
    let n = cfg.n;
    let mut row_order: Vec<u32> = (0..n as u32).collect();
    let mut col_order: Vec<u32> = (0..n as u32).collect();
    row_order.shuffle(rng);
    col_order.shuffle(rng);
    // row_order[g] = row placed at band position g; invert for O(1) lookups.
    let mut row_pos = vec![0u32; n];
    let mut col_pos = vec![0u32; n];
    for (g, &r) in row_order.iter().enumerate() {
        row_pos[r as usize] = g as u32;
    }
    for (g, &c) in col_order.iter().enumerate() {
        col_pos[c as usize] = g as u32;
    }
    Ok(WorkingSet { n, kind: SelectionKind::Band, repr: WsRepr::Band { row_pos, col_pos, p: cfg.band_width } })
}

/// Uniform random m-subset of rows crossed with an independent m-subset of
/// columns.
pub fn select_submatrix(cfg: &SelectorConfig, rng: &mut ChaCha8Rng) -> Result<WorkingSet> {
    cfg.validate()?;
    let n = cfg.n;
    let m = cfg.submatrix_dim;
    let mut rows: Vec<u32> = rand::seq::index::sample(rng, n, m).into_iter().map(|r| r as u32).collect();
    let mut cols: Vec<u32> = rand::seq::index::sample(rng, n, m).into_iter().map(|c| c as u32).collect();
    rows.sort_unstable();
    cols.sort_unstable();
    let mut row_in = vec![false; n];
    let mut col_in = vec![false; n];
    for &r in &rows {
        row_in[r as usize] = true;
    }
    for &c in &cols {
        col_in[c as usize] = true;
    }
    Ok(WorkingSet { n, kind: SelectionKind::Submatrix, repr: WsRepr::Submatrix { rows, cols, row_in, col_in } })
}

/// Band with probability `band_probability`, submatrix otherwise.
pub fn select_sdb(cfg: &SelectorConfig, rng: &mut ChaCha8Rng) -> Result<WorkingSet> {
    cfg.validate()?;
    let coin: f64 = rng.gen();
    if coin < cfg.band_probability {
        select_band(cfg, rng)
    } else {
        select_submatrix(cfg, rng)
    }
}

/// Uniform random `m^2`-subset of the displacement support. The caller must
/// fall back to `select_sdb` when the support is not larger than `m^2`.
pub fn select_momentum(
    n: usize,
    diff_support: &[(u32, u32)],
    submatrix_dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<WorkingSet> {
    let want = submatrix_dim * submatrix_dim;
    if diff_support.len() <= want {
        return Err(OtError::MomentumSupportTooSmall { support: diff_support.len(), required: want });
    }
    let mut cells: Vec<(u32, u32)> = rand::seq::index::sample(rng, diff_support.len(), want)
        .into_iter()
        .map(|k| diff_support[k])
        .collect();
    cells.sort_unstable();
    Ok(WorkingSet { n, kind: SelectionKind::Momentum, repr: WsRepr::Cells(cells) })
}
