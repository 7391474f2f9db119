//! Null space of the transportation constraint matrix.
//!
//! A matrix direction lies in the null space exactly when all its row and
//! column sums vanish. The minimal-support directions are signed simple
//! cycles in the bipartite row/column graph; any null direction decomposes
//! into sign-compatible cycles, and that decomposition drives both the
//! refined working-set rules and their rate bounds.

use std::collections::BTreeMap;

use statrs::function::gamma::ln_gamma;

use crate::error::{OtError, Result};
use crate::plan::TransportPlan;

/// Tolerance on row/column sums for null-space membership.
pub const NULL_TOL: f64 = 1e-10;
/// Entries at or below this are treated as absent after subtraction.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Sparse signed matrix tested for null-space membership.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NullDirection {
    n: usize,
    entries: BTreeMap<(u32, u32), f64>,
}

impl NullDirection {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (u32, u32, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (i, j, v) in entries {
            debug_assert!((i as usize) < n && (j as usize) < n);
            if v != 0.0 {
                map.insert((i, j), v);
            }
        }
        Self { n, entries: map }
    }

    /// Difference of two plans on the same marginals is always a null direction.
    pub fn from_plan_difference(a: &TransportPlan, b: &TransportPlan) -> Self {
        let n = a.n().max(b.n());
        let mut map = BTreeMap::new();
        for (i, j, m) in a.iter() {
            map.insert((i, j), m);
        }
        for (i, j, m) in b.iter() {
            let e = map.entry((i, j)).or_insert(0.0);
            *e -= m;
            if *e == 0.0 {
                map.remove(&(i, j));
            }
        }
        Self { n, entries: map }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value_at(&self, i: u32, j: u32) -> f64 {
        self.entries.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.entries.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    /// True iff every row and column sum vanishes within 1e-10.
    pub fn is_null_direction(&self) -> bool {
        self.max_line_sum() <= NULL_TOL
    }

    fn max_line_sum(&self) -> f64 {
        let mut rows = vec![0.0; self.n];
        let mut cols = vec![0.0; self.n];
        for (&(i, j), &v) in &self.entries {
            rows[i as usize] += v;
            cols[j as usize] += v;
        }
        rows.iter().chain(cols.iter()).fold(0.0f64, |acc, s| acc.max(s.abs()))
    }
}

/// A scaled signed simple cycle: `2t` cells alternating `+scale` / `-scale`,
/// consecutive cells alternately sharing a column and a row.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryMatrix {
    pub scale: f64,
    /// Cells in cycle order; even positions carry `+scale`, odd `-scale`.
    pub cycle: Vec<(u32, u32)>,
}

impl ElementaryMatrix {
    /// Number of rows (equivalently columns) the cycle touches.
    pub fn t(&self) -> usize {
        self.cycle.len() / 2
    }

    pub fn value_at(&self, i: u32, j: u32) -> f64 {
        match self.cycle.iter().position(|&c| c == (i, j)) {
            Some(k) if k % 2 == 0 => self.scale,
            Some(_) => -self.scale,
            None => 0.0,
        }
    }

    pub fn to_null_direction(&self, n: usize) -> NullDirection {
        NullDirection::new(
            n,
            self.cycle
                .iter()
                .enumerate()
                .map(|(k, &(i, j))| (i, j, if k % 2 == 0 { self.scale } else { -self.scale })),
        )
    }

    /// Structural validity: alternating shared lines, closed, no repeats.
    pub fn is_simple_cycle(&self) -> bool {
        let m = self.cycle.len();
        if m < 4 || m % 2 != 0 || self.scale == 0.0 {
            return false;
        }
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..m {
            if !seen.insert(self.cycle[k]) {
                return false;
            }
            let (a, b) = (self.cycle[k], self.cycle[(k + 1) % m]);
            let share_col = a.1 == b.1 && a.0 != b.0;
            let share_row = a.0 == b.0 && a.1 != b.1;
            // Even step: positive cell to negative cell along a column.
            if k % 2 == 0 && !share_col {
                return false;
            }
            if k % 2 == 1 && !share_row {
                return false;
            }
        }
        true
    }
}

/// Finds an elementary matrix conformal to `direction` (support contained in
/// the direction's support, with matching signs cellwise). The returned scale
/// is 1; callers rescale as needed.
pub fn find_elementary_conformal(direction: &NullDirection) -> Result<ElementaryMatrix> {
    find_elementary_conformal_counted(direction).map(|(e, _)| e)
}

/// As [`find_elementary_conformal`], also reporting how many cells the cycle
/// walk examined (bounded by a small multiple of n^2).
pub fn find_elementary_conformal_counted(direction: &NullDirection) -> Result<(ElementaryMatrix, usize)> {
    if direction.is_zero() {
        return Err(OtError::NotNullDirection { residual: f64::INFINITY });
    }
    if !direction.is_null_direction() {
        return Err(OtError::NotNullDirection { residual: direction.max_line_sum() });
    }
    let mut visits = 0usize;
    match walk_cycle(direction, &mut visits)? {
        Some(e) => Ok((e, visits)),
        None => Err(OtError::NotNullDirection { residual: direction.max_line_sum() }),
    }
}

/// Walks the support graph from cell to cell, choosing the smallest-index
/// admissible cell of the required sign, until a row or column node repeats;
/// the enclosed segment is a sign-alternating simple cycle.
fn walk_cycle(direction: &NullDirection, visits: &mut usize) -> Result<Option<ElementaryMatrix>> {
    // Sorted adjacency per line.
    let mut by_row: BTreeMap<u32, Vec<(u32, f64)>> = BTreeMap::new();
    let mut by_col: BTreeMap<u32, Vec<(u32, f64)>> = BTreeMap::new();
    for (i, j, v) in direction.iter() {
        by_row.entry(i).or_default().push((j, v));
        by_col.entry(j).or_default().push((i, v));
    }

    #[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
    enum Node {
        Row(u32),
        Col(u32),
    }

    // From a row node take its smallest positive cell (walking to the cell's
    // column); from a column node take its smallest negative cell.
    let start_row = *by_row.keys().next().expect("nonzero direction");
    let mut node = Node::Row(start_row);
    let mut seen: std::collections::HashMap<Node, usize> = std::collections::HashMap::new();
    // walk[k] = (cell, value-at-cell); cells alternate positive / negative.
    let mut walk: Vec<((u32, u32), f64)> = Vec::new();
    loop {
        if let Some(&pos) = seen.get(&node) {
            let mut segment: Vec<((u32, u32), f64)> = walk[pos..].to_vec();
            // Closing on a column node phase-shifts the alternation; rotate
            // so the cycle starts on a positive cell.
            if segment[0].1 < 0.0 {
                segment.rotate_left(1);
            }
            debug_assert!(segment.len() >= 4 && segment.len() % 2 == 0);
            debug_assert!(segment
                .iter()
                .enumerate()
                .all(|(k, &(_, v))| if k % 2 == 0 { v > 0.0 } else { v < 0.0 }));
            let e = ElementaryMatrix { scale: 1.0, cycle: segment.into_iter().map(|(c, _)| c).collect() };
            debug_assert!(e.is_simple_cycle());
            return Ok(Some(e));
        }
        seen.insert(node, walk.len());
        match node {
            Node::Row(i) => {
                let mut next = None;
                for &(j, v) in by_row.get(&i).into_iter().flatten() {
                    *visits += 1;
                    if v > 0.0 {
                        next = Some((j, v));
                        break;
                    }
                }
                match next {
                    Some((j, v)) => {
                        walk.push(((i, j), v));
                        node = Node::Col(j);
                    }
                    None => return Ok(None),
                }
            }
            Node::Col(j) => {
                let mut next = None;
                for &(i, v) in by_col.get(&j).into_iter().flatten() {
                    *visits += 1;
                    if v < 0.0 {
                        next = Some((i, v));
                        break;
                    }
                }
                match next {
                    Some((i, v)) => {
                        walk.push(((i, j), v));
                        node = Node::Row(i);
                    }
                    None => return Ok(None),
                }
            }
        }
    }
}

/// Decomposes a null direction into conformal elementary parts that sum back
/// to it. Each round subtracts the largest feasible multiple of a conformal
/// cycle, removing at least one support cell, so at most
/// `max(1, |supp| - 3)` parts are produced.
pub fn conformal_realization(direction: &NullDirection) -> Result<Vec<ElementaryMatrix>> {
    if !direction.is_null_direction() {
        return Err(OtError::NotNullDirection { residual: direction.max_line_sum() });
    }
    let mut residual = direction.clone();
    let mut parts = Vec::new();
    let cap = direction.support_size() + 1;
    while !residual.is_zero() {
        if parts.len() > cap {
            return Err(OtError::NotNullDirection { residual: residual.max_line_sum() });
        }
        let mut visits = 0;
        let cycle = match walk_cycle(&residual, &mut visits)? {
            Some(c) => c,
            None => {
                // Only rounding dust may remain once the walk gets stuck.
                let worst = residual.iter().fold(0.0f64, |a, (_, _, v)| a.max(v.abs()));
                if worst <= 1e-9 {
                    break;
                }
                return Err(OtError::NotNullDirection { residual: worst });
            }
        };
        let alpha = cycle
            .cycle
            .iter()
            .map(|&(i, j)| residual.value_at(i, j).abs())
            .fold(f64::INFINITY, f64::min);
        debug_assert!(alpha > 0.0);
        for (k, &(i, j)) in cycle.cycle.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let old = residual.value_at(i, j);
            let new = old - sign * alpha;
            if new.abs() <= SUPPORT_TOL {
                residual.entries.remove(&(i, j));
            } else {
                residual.entries.insert((i, j), new);
            }
        }
        parts.push(ElementaryMatrix { scale: alpha, cycle: cycle.cycle });
    }
    Ok(parts)
}

/// Natural logs of the working-set rate lower bounds, evaluated with
/// log-gamma so large n cannot overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    /// Uniform selection of l cells: `1 / (binom(n^2, l) (n^2 - l + 1))`.
    pub log_v_uniform: f64,
    /// Permuted diagonal band of width p: `n (p-2) / ((n^2 - 3) (n!)^2)`.
    pub log_v_band: f64,
    /// Band/submatrix mixture with band probability s: s times the band bound.
    pub log_v_sdb: f64,
}

pub fn rate_bound_log(n: usize, p: usize, l: usize, s: f64) -> Result<RateBounds> {
    if n < 3 {
        return Err(OtError::InvalidParameter("need n >= 3".into()));
    }
    if p < 3 || p > n {
        return Err(OtError::InvalidParameter(format!("band width {p} outside [3, {n}]")));
    }
    if l < 2 * n || l > n * n {
        return Err(OtError::InvalidParameter(format!(
            "uniform size {l} outside [2n, n^2] = [{}, {}]",
            2 * n,
            n * n
        )));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(OtError::InvalidParameter(format!("selection probability {s} outside (0, 1]")));
    }
    let nf = n as f64;
    let big_n = nf * nf;
    let lf = l as f64;
    let ln_binom = ln_gamma(big_n + 1.0) - ln_gamma(lf + 1.0) - ln_gamma(big_n - lf + 1.0);
    let log_v_uniform = -(ln_binom + (big_n - lf + 1.0).ln());
    let log_v_band = (nf * (p as f64 - 2.0)).ln() - (big_n - 3.0).ln() - 2.0 * ln_gamma(nf + 1.0);
    let log_v_sdb = s.ln() + log_v_band;
    Ok(RateBounds { log_v_uniform, log_v_band, log_v_sdb })
}
