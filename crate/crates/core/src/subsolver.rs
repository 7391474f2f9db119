//! Exact and inexact solver for the restricted transportation subproblems.
//!
//! Every subproblem of the block coordinate descent is itself a (small)
//! transportation problem: freezing all cells outside the working set and
//! substituting `x' = x + d` leaves a min-cost flow on the bipartite graph
//! of working-set cells, with row/column budgets given by the current plan's
//! mass inside the set. The solver is a primal network simplex on a
//! spanning-tree basis, warm-started from the incoming plan.

use std::collections::BTreeMap;

use crate::error::{OtError, Result};
use crate::plan::{northwest_plan, TransportPlan};
use crate::problem::{Cost, OtInstance};
use crate::select::WorkingSet;
use crate::trajectory::SelectionKind;

/// Budgets differing by more than this are rejected as unbalanced.
pub const BALANCE_TOL: f64 = 1e-10;
/// Default optimality tolerance on reduced costs.
pub const DEFAULT_OPT_TOL: f64 = 1e-9;

/// One admissible cell of a restricted subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubArc {
    /// Global plan row.
    pub row: u32,
    /// Global plan column.
    pub col: u32,
    pub cost: f64,
    /// Mass the incoming plan already places on this cell.
    pub warm: f64,
    lrow: u32,
    lcol: u32,
}

/// A transportation problem on the cells of a working set.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedSubproblem {
    rows: Vec<u32>,
    cols: Vec<u32>,
    row_budget: Vec<f64>,
    col_budget: Vec<f64>,
    arcs: Vec<SubArc>,
    incoming_value: f64,
    incoming_cells: Vec<((u32, u32), f64)>,
}

impl RestrictedSubproblem {
    /// Global row ids with positive budget.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    pub fn row_budget(&self) -> &[f64] {
        &self.row_budget
    }

    pub fn col_budget(&self) -> &[f64] {
        &self.col_budget
    }

    pub fn arcs(&self) -> &[SubArc] {
        &self.arcs
    }

    pub fn is_trivial(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Restricted objective of the incoming plan.
    pub fn incoming_value(&self) -> f64 {
        self.incoming_value
    }

    /// Plan cells inside the working set, with their incoming mass.
    pub fn incoming_cells(&self) -> &[((u32, u32), f64)] {
        &self.incoming_cells
    }

    /// Builds a subproblem from explicit budgets over the complete bipartite
    /// grid; zero-budget rows and columns are dropped. The warm start is the
    /// north-west coupling of the budgets.
    pub fn from_budgets(
        row_budget: &[f64],
        col_budget: &[f64],
        cost: impl Fn(u32, u32) -> f64,
    ) -> Result<Self> {
        let warm = northwest_plan(
            row_budget.len().max(col_budget.len()),
            &pad(row_budget, row_budget.len().max(col_budget.len())),
            &pad(col_budget, row_budget.len().max(col_budget.len())),
        )?;
        let rows: Vec<u32> = (0..row_budget.len() as u32).filter(|&i| row_budget[i as usize] > 0.0).collect();
        let cols: Vec<u32> = (0..col_budget.len() as u32).filter(|&j| col_budget[j as usize] > 0.0).collect();
        let mut arcs = Vec::with_capacity(rows.len() * cols.len());
        let mut incoming_value = 0.0;
        let mut incoming_cells = Vec::new();
        for (li, &i) in rows.iter().enumerate() {
            for (lj, &j) in cols.iter().enumerate() {
                let c = cost(i, j);
                if !(c.is_finite() && c >= 0.0) {
                    return Err(OtError::InvalidParameter(format!("arc cost {c} at ({i},{j})")));
                }
                let w = warm.mass_at(i, j);
                if w > 0.0 {
                    incoming_value += c * w;
                    incoming_cells.push(((i, j), w));
                }
                arcs.push(SubArc { row: i, col: j, cost: c, warm: w, lrow: li as u32, lcol: lj as u32 });
            }
        }
        Ok(Self {
            row_budget: rows.iter().map(|&i| row_budget[i as usize]).collect(),
            col_budget: cols.iter().map(|&j| col_budget[j as usize]).collect(),
            rows,
            cols,
            arcs,
            incoming_value,
            incoming_cells,
        })
    }
}

fn pad(xs: &[f64], n: usize) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.resize(n, 0.0);
    v
}

/// Budgets are the row/column mass of `plan` restricted to `ws`; cells of the
/// plan outside `ws` are untouched by any flow on the subproblem.
pub fn build_restricted(plan: &TransportPlan, cost: &Cost, ws: &WorkingSet) -> Result<RestrictedSubproblem> {
    if ws.is_empty() {
        return Err(OtError::EmptyWorkingSet);
    }
    let mut row_budget: BTreeMap<u32, f64> = BTreeMap::new();
    let mut col_budget: BTreeMap<u32, f64> = BTreeMap::new();
    let mut incoming_cells = Vec::new();
    let mut incoming_value = 0.0;
    for (i, j, mass) in plan.iter() {
        if ws.contains(i, j) {
            *row_budget.entry(i).or_insert(0.0) += mass;
            *col_budget.entry(j).or_insert(0.0) += mass;
            incoming_value += cost.at(i as usize, j as usize) * mass;
            incoming_cells.push(((i, j), mass));
        }
    }
    let rows: Vec<u32> = row_budget.keys().copied().collect();
    let cols: Vec<u32> = col_budget.keys().copied().collect();
    let col_local: BTreeMap<u32, u32> = cols.iter().enumerate().map(|(l, &j)| (j, l as u32)).collect();

    let mut arcs = Vec::new();
    match ws.kind() {
        SelectionKind::Uniform | SelectionKind::Momentum => {
            for (i, j) in ws.cells() {
                if let (Ok(lrow), Some(&lcol)) = (rows.binary_search(&i), col_local.get(&j)) {
                    push_arc(&mut arcs, cost, i, j, lrow as u32, lcol)?;
                }
            }
        }
        _ => {
            for (li, &i) in rows.iter().enumerate() {
                for (lj, &j) in cols.iter().enumerate() {
                    if ws.contains(i, j) {
                        push_arc(&mut arcs, cost, i, j, li as u32, lj as u32)?;
                    }
                }
            }
        }
    }
    // Warm-start mass per arc.
    let arc_index: BTreeMap<(u32, u32), usize> =
        arcs.iter().enumerate().map(|(k, a)| ((a.row, a.col), k)).collect();
    for &((i, j), mass) in &incoming_cells {
        if let Some(&k) = arc_index.get(&(i, j)) {
            arcs[k].warm = mass;
        }
    }
    Ok(RestrictedSubproblem {
        row_budget: row_budget.values().copied().collect(),
        col_budget: col_budget.values().copied().collect(),
        rows,
        cols,
        arcs,
        incoming_value,
        incoming_cells,
    })
}

fn push_arc(arcs: &mut Vec<SubArc>, cost: &Cost, i: u32, j: u32, lrow: u32, lcol: u32) -> Result<()> {
    let c = cost.at(i as usize, j as usize);
    if !(c.is_finite() && c >= 0.0) {
        return Err(OtError::InvalidParameter(format!("arc cost {c} at ({i},{j})")));
    }
    arcs.push(SubArc { row: i, col: j, cost: c, warm: 0.0, lrow, lcol });
    Ok(())
}

/// Exact, or early-stopped with a guaranteed share of the optimal decrease.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMode {
    Exact,
    /// Stop once the achieved decrease is at least `(1 - relative_gap)` of
    /// the optimal one.
    Inexact { relative_gap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveStatus {
    Optimal,
    Inexact { relative_gap: f64 },
}

/// A feasible flow on the subproblem arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSolution {
    /// Strictly positive arc masses keyed by global cell, in lexicographic order.
    pub flow: Vec<((u32, u32), f64)>,
    /// New restricted objective.
    pub value: f64,
    pub status: SolveStatus,
    /// Dual potentials per global row / column of the subproblem.
    pub row_potentials: Vec<(u32, f64)>,
    pub col_potentials: Vec<(u32, f64)>,
    /// Simplex pivots performed.
    pub pivots: usize,
}

/// Solves the restricted transportation problem with the default reduced-cost
/// tolerance.
pub fn solve_transportation(sub: &RestrictedSubproblem, mode: SolveMode) -> Result<SubSolution> {
    solve_transportation_with_tol(sub, mode, DEFAULT_OPT_TOL)
}

pub fn solve_transportation_with_tol(
    sub: &RestrictedSubproblem,
    mode: SolveMode,
    opt_tol: f64,
) -> Result<SubSolution> {
    let total_row: f64 = sub.row_budget.iter().sum();
    let total_col: f64 = sub.col_budget.iter().sum();
    let imbalance = (total_row - total_col).abs();
    if imbalance > BALANCE_TOL {
        return Err(OtError::UnbalancedBudgets { imbalance });
    }
    if sub.arcs.is_empty() {
        return Ok(SubSolution {
            flow: Vec::new(),
            value: 0.0,
            status: SolveStatus::Optimal,
            row_potentials: Vec::new(),
            col_potentials: Vec::new(),
            pivots: 0,
        });
    }
    match mode {
        SolveMode::Exact => {
            let mut simplex = Simplex::new(sub, opt_tol);
            let pivots = simplex.run(None)?;
            Ok(simplex.extract(SolveStatus::Optimal, pivots))
        }
        SolveMode::Inexact { relative_gap } => {
            if !(0.0..1.0).contains(&relative_gap) {
                return Err(OtError::InvalidParameter(format!(
                    "relative gap {relative_gap} outside [0, 1)"
                )));
            }
            if relative_gap == 0.0 {
                let mut simplex = Simplex::new(sub, opt_tol);
                let pivots = simplex.run(None)?;
                return Ok(simplex.extract(SolveStatus::Inexact { relative_gap }, pivots));
            }
            // First pass to optimality, then replay the deterministic pivot
            // sequence up to the first iterate achieving the required share
            // of the decrease. Simplex iterates conserve budgets exactly, so
            // early stopping never perturbs feasibility.
            let mut first = Simplex::new(sub, opt_tol);
            let pivots = first.run(None)?;
            // The decrease is measured from the incoming plan; basis
            // construction already descends, so it counts toward the target.
            let start = sub.incoming_value;
            let target = start + (1.0 - relative_gap) * (first.objective - start);
            let stop_after = if first.basis_objective <= target {
                0
            } else {
                first
                    .objective_trace
                    .iter()
                    .position(|&obj| obj <= target)
                    .map(|k| k + 1)
                    .unwrap_or(pivots)
            };
            if stop_after >= pivots {
                return Ok(first.extract(SolveStatus::Inexact { relative_gap }, pivots));
            }
            let mut replay = Simplex::new(sub, opt_tol);
            let done = replay.run(Some(stop_after))?;
            Ok(replay.extract(SolveStatus::Inexact { relative_gap }, done))
        }
    }
}

/// Solves the whole instance as one transportation problem (the exact oracle).
/// The returned plan is an optimal basic solution, so its support has at most
/// `2n - 1` cells.
pub fn solve_full(instance: &OtInstance) -> Result<(TransportPlan, f64)> {
    let cost = instance.cost();
    let sub = RestrictedSubproblem::from_budgets(
        instance.r1().weights(),
        instance.r2().weights(),
        |i, j| cost.at(i as usize, j as usize),
    )?;
    let sol = solve_transportation(&sub, SolveMode::Exact)?;
    let plan = TransportPlan::from_entries(instance.n(), sol.flow.iter().map(|&((i, j), m)| (i, j, m)))?;
    Ok((plan, sol.value))
}

// ---------------------------------------------------------------------------
// Network simplex on a spanning-tree basis.
// ---------------------------------------------------------------------------

const NONE: usize = usize::MAX;

struct Simplex<'a> {
    sub: &'a RestrictedSubproblem,
    opt_tol: f64,
    nodes: usize,
    n_rows: usize,
    /// Real arcs first (same order as `sub.arcs`), artificial connectors after.
    tails: Vec<u32>,
    heads: Vec<u32>,
    costs: Vec<f64>,
    real_arcs: usize,
    flow: Vec<f64>,
    in_tree: Vec<bool>,
    tree_adj: Vec<Vec<usize>>,
    parent: Vec<usize>,
    pred_arc: Vec<usize>,
    depth: Vec<u32>,
    potential: Vec<f64>,
    scan_start: usize,
    objective: f64,
    basis_objective: f64,
    /// Objective value after each pivot (for early stopping).
    objective_trace: Vec<f64>,
}

impl<'a> Simplex<'a> {
    fn new(sub: &'a RestrictedSubproblem, opt_tol: f64) -> Self {
        let n_rows = sub.rows.len();
        let nodes = n_rows + sub.cols.len();
        let real_arcs = sub.arcs.len();
        let mut sx = Simplex {
            sub,
            opt_tol,
            nodes,
            n_rows,
            tails: sub.arcs.iter().map(|a| a.lrow).collect(),
            heads: sub.arcs.iter().map(|a| (n_rows as u32) + a.lcol).collect(),
            costs: sub.arcs.iter().map(|a| a.cost).collect(),
            real_arcs,
            flow: sub.arcs.iter().map(|a| a.warm).collect(),
            in_tree: vec![false; real_arcs],
            tree_adj: vec![Vec::new(); nodes],
            parent: vec![NONE; nodes],
            pred_arc: vec![NONE; nodes],
            depth: vec![0; nodes],
            potential: vec![0.0; nodes],
            scan_start: 0,
            objective: 0.0,
            basis_objective: 0.0,
            objective_trace: Vec::new(),
        };
        sx.objective = sx
            .flow
            .iter()
            .zip(&sx.costs)
            .map(|(f, c)| f * c)
            .sum();
        sx.build_basis();
        sx.basis_objective = sx.objective;
        sx
    }

    fn tail(&self, a: usize) -> usize {
        self.tails[a] as usize
    }

    fn head(&self, a: usize) -> usize {
        self.heads[a] as usize
    }

    /// Turns the warm flow into a basic feasible flow: insert positive arcs
    /// into a forest, cancelling any cycle in the cost-nonincreasing
    /// direction, then extend with degenerate and (if the arc set is
    /// disconnected) artificial zero-flow arcs.
    fn build_basis(&mut self) {
        let mut uf = UnionFind::new(self.nodes);
        for a in 0..self.real_arcs {
            if self.flow[a] <= 0.0 {
                continue;
            }
            let (u, v) = (self.tail(a), self.head(a));
            if uf.union(u, v) {
                self.add_tree_arc(a);
                self.rebuild_tree();
            } else {
                self.cancel_cycle(a);
            }
        }
        for a in 0..self.real_arcs {
            if !self.in_tree[a] && uf.union(self.tail(a), self.head(a)) {
                self.add_tree_arc(a);
            }
        }
        // Components are internally balanced, so connector arcs never carry
        // flow; cost 0 keeps the potentials harmless.
        let mut comp_root = NONE;
        for node in 0..self.nodes {
            let root = uf.find(node);
            if comp_root == NONE {
                comp_root = root;
                continue;
            }
            if root != uf.find(comp_root) {
                let (u, v) = if node < self.n_rows { (node, comp_root) } else { (comp_root, node) };
                let (tail, head) = if u < self.n_rows { (u, v) } else { (v, u) };
                let a = self.tails.len();
                self.tails.push(tail as u32);
                self.heads.push(head as u32);
                self.costs.push(0.0);
                self.flow.push(0.0);
                self.in_tree.push(false);
                uf.union(tail, head);
                self.add_tree_arc(a);
            }
        }
        self.rebuild_tree();
    }

    fn add_tree_arc(&mut self, a: usize) {
        self.in_tree[a] = true;
        let (u, v) = (self.tail(a), self.head(a));
        self.tree_adj[u].push(a);
        self.tree_adj[v].push(a);
    }

    fn drop_tree_arc(&mut self, a: usize) {
        self.in_tree[a] = false;
        let (u, v) = (self.tail(a), self.head(a));
        self.tree_adj[u].retain(|&x| x != a);
        self.tree_adj[v].retain(|&x| x != a);
    }

    /// BFS over tree arcs: parents, depths, and dual potentials.
    fn rebuild_tree(&mut self) {
        for node in 0..self.nodes {
            self.parent[node] = NONE;
            self.pred_arc[node] = NONE;
            self.depth[node] = 0;
        }
        let mut seen = vec![false; self.nodes];
        let mut queue = Vec::with_capacity(self.nodes);
        for root in 0..self.nodes {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            self.potential[root] = 0.0;
            queue.clear();
            queue.push(root);
            let mut qi = 0;
            while qi < queue.len() {
                let u = queue[qi];
                qi += 1;
                for k in 0..self.tree_adj[u].len() {
                    let a = self.tree_adj[u][k];
                    let w = self.tail(a) + self.head(a) - u;
                    if seen[w] {
                        continue;
                    }
                    seen[w] = true;
                    self.parent[w] = u;
                    self.pred_arc[w] = a;
                    self.depth[w] = self.depth[u] + 1;
                    // Tree arcs are tight: cost = pot(tail) + pot(head).
                    self.potential[w] = self.costs[a] - self.potential[u];
                    queue.push(w);
                }
            }
        }
    }

    #[inline]
    fn reduced_cost(&self, a: usize) -> f64 {
        self.costs[a] - self.potential[self.tail(a)] - self.potential[self.head(a)]
    }

    /// Tree path from `u` to `v` as `(arc, aligned_with_walk)` pairs.
    fn collect_path(&self, u: usize, v: usize) -> Vec<(usize, bool)> {
        let mut up_side = Vec::new();
        let mut down_side = Vec::new();
        let (mut x, mut y) = (u, v);
        while self.depth[x] > self.depth[y] {
            let a = self.pred_arc[x];
            up_side.push((a, self.tail(a) == x));
            x = self.parent[x];
        }
        while self.depth[y] > self.depth[x] {
            let a = self.pred_arc[y];
            down_side.push((a, self.head(a) == y));
            y = self.parent[y];
        }
        while x != y {
            let a = self.pred_arc[x];
            up_side.push((a, self.tail(a) == x));
            x = self.parent[x];
            let b = self.pred_arc[y];
            down_side.push((b, self.head(b) == y));
            y = self.parent[y];
        }
        down_side.reverse();
        up_side.extend(down_side);
        up_side
    }

    /// Cancels the cycle closed by positive non-tree arc `a`, pushing flow in
    /// the direction of nonincreasing cost.
    fn cancel_cycle(&mut self, a: usize) {
        let path = self.collect_path(self.tail(a), self.head(a));
        // Walking tail -> head, aligned arcs gain when the circulation runs
        // against `a`; cycle cost per unit of that circulation:
        let mut cycle_cost = -self.costs[a];
        for &(e, aligned) in &path {
            cycle_cost += if aligned { self.costs[e] } else { -self.costs[e] };
        }
        let against_a = cycle_cost <= 0.0;
        // Arcs whose flow decreases under the chosen direction.
        let mut theta = f64::INFINITY;
        let mut leaving = NONE;
        let consider = |arc: usize, flow: f64, theta: &mut f64, leaving: &mut usize| {
            if flow < *theta || (flow == *theta && arc < *leaving) {
                *theta = flow;
                *leaving = arc;
            }
        };
        if against_a {
            consider(a, self.flow[a], &mut theta, &mut leaving);
        }
        for &(e, aligned) in &path {
            if aligned != against_a {
                consider(e, self.flow[e], &mut theta, &mut leaving);
            }
        }
        debug_assert!(leaving != NONE);
        self.apply_circulation(a, &path, against_a, theta, leaving);
        if against_a {
            self.objective += theta * cycle_cost;
        } else {
            self.objective -= theta * cycle_cost;
        }
        if leaving != a {
            self.drop_tree_arc(leaving);
            self.add_tree_arc(a);
            self.rebuild_tree();
        }
    }

    fn apply_circulation(&mut self, a: usize, path: &[(usize, bool)], against_a: bool, theta: f64, leaving: usize) {
        if against_a {
            self.flow[a] -= theta;
        } else {
            self.flow[a] += theta;
        }
        for &(e, aligned) in path {
            if aligned == against_a {
                self.flow[e] += theta;
            } else {
                self.flow[e] -= theta;
            }
        }
        self.flow[leaving] = 0.0;
    }

    fn find_entering(&mut self, bland: bool) -> Option<usize> {
        if bland {
            return (0..self.real_arcs)
                .find(|&a| !self.in_tree[a] && self.reduced_cost(a) < -self.opt_tol);
        }
        let arcs = self.real_arcs;
        let block = if arcs <= 4096 { arcs } else { ((arcs as f64).sqrt() as usize) * 2 };
        let mut best = NONE;
        let mut best_rc = -self.opt_tol;
        let mut pos = self.scan_start.min(arcs.saturating_sub(1));
        for scanned in 1..=arcs {
            let a = pos;
            pos += 1;
            if pos == arcs {
                pos = 0;
            }
            if !self.in_tree[a] {
                let rc = self.reduced_cost(a);
                if rc < best_rc {
                    best_rc = rc;
                    best = a;
                }
            }
            if scanned % block == 0 && best != NONE {
                break;
            }
        }
        if best == NONE {
            None
        } else {
            self.scan_start = (best + 1) % arcs;
            Some(best)
        }
    }

    /// Pivots to optimality (or for `stop_after` pivots). Returns the pivot
    /// count. Switches to Bland's smallest-index rule after `10 * arcs`
    /// pivots; a generous hard cap turns suspected cycling into an error.
    fn run(&mut self, stop_after: Option<usize>) -> Result<usize> {
        let bland_threshold = 10 * self.real_arcs;
        let hard_cap = bland_threshold + 200 * (self.nodes + self.real_arcs) + 100_000;
        let mut pivots = 0;
        loop {
            if let Some(limit) = stop_after {
                if pivots >= limit {
                    return Ok(pivots);
                }
            }
            let Some(entering) = self.find_entering(pivots >= bland_threshold) else {
                return Ok(pivots);
            };
            if pivots >= hard_cap {
                return Err(OtError::CyclingSafeguard {
                    pivots,
                    arcs: self.real_arcs,
                    nodes: self.nodes,
                    objective: self.objective,
                });
            }
            let rc = self.reduced_cost(entering);
            let path = self.collect_path(self.head(entering), self.tail(entering));
            // Entering flow increases; arcs anti-aligned with the return walk
            // decrease.
            let mut theta = f64::INFINITY;
            let mut leaving = NONE;
            for &(e, aligned) in &path {
                if !aligned && (self.flow[e] < theta || (self.flow[e] == theta && e < leaving)) {
                    theta = self.flow[e];
                    leaving = e;
                }
            }
            debug_assert!(leaving != NONE, "transportation cycles always have a reverse arc");
            self.flow[entering] += theta;
            for &(e, aligned) in &path {
                if aligned {
                    self.flow[e] += theta;
                } else {
                    self.flow[e] -= theta;
                }
            }
            self.flow[leaving] = 0.0;
            self.drop_tree_arc(leaving);
            self.add_tree_arc(entering);
            self.rebuild_tree();
            self.objective += theta * rc;
            pivots += 1;
            self.objective_trace.push(self.objective);
        }
    }

    /// Recomputes the basic flow from the budgets by leaf elimination (one
    /// rounding step per arc instead of one per pivot) and packages the
    /// solution.
    fn extract(&self, status: SolveStatus, pivots: usize) -> SubSolution {
        let mut residual = vec![0.0; self.nodes];
        for (l, &b) in self.sub.row_budget.iter().enumerate() {
            residual[l] = b;
        }
        for (l, &b) in self.sub.col_budget.iter().enumerate() {
            residual[self.n_rows + l] = b;
        }
        let mut order: Vec<usize> = (0..self.nodes).collect();
        order.sort_unstable_by_key(|&v| std::cmp::Reverse(self.depth[v]));
        let mut tree_flow = vec![0.0; self.tails.len()];
        for &node in &order {
            let a = self.pred_arc[node];
            if a == NONE {
                continue;
            }
            let f = residual[node].max(0.0);
            tree_flow[a] = f;
            residual[self.parent[node]] -= residual[node];
            residual[node] = 0.0;
        }
        let mut flow = Vec::new();
        let mut value = 0.0;
        for (k, arc) in self.sub.arcs.iter().enumerate() {
            let f = if self.in_tree[k] { tree_flow[k] } else { 0.0 };
            if f > 0.0 {
                value += arc.cost * f;
                flow.push(((arc.row, arc.col), f));
            }
        }
        let row_potentials = self
            .sub
            .rows
            .iter()
            .enumerate()
            .map(|(l, &i)| (i, self.potential[l]))
            .collect();
        let col_potentials = self
            .sub
            .cols
            .iter()
            .enumerate()
            .map(|(l, &j)| (j, self.potential[self.n_rows + l]))
            .collect();
        SubSolution { flow, value, status, row_potentials, col_potentials, pivots }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the sets were previously disjoint.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            self.parent[ra] = rb;
            true
        }
    }
}
