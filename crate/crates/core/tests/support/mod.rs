//! Shared test-only machinery: brute-force oracles independent of the
//! solver's simplex path, random problem generators, and a peak-memory probe.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use otbcd::datasets::Points;
use otbcd::nullspace::NullDirection;
use otbcd::plan::{initial_plan_northwest, initial_plan_product};
use otbcd::problem::{CostMatrix, DiscreteMarginal, OtInstance};
use otbcd::TransportPlan;

/// Minimum transport cost by enumerating every spanning tree of the complete
/// bipartite graph on positive-budget nodes and keeping the feasible basic
/// flows. Exact for any balanced budgets; exponential, so keep n small.
pub fn transportation_oracle(
    row_budget: &[f64],
    col_budget: &[f64],
    cost: &dyn Fn(usize, usize) -> f64,
) -> f64 {
    let rows: Vec<usize> = (0..row_budget.len()).filter(|&i| row_budget[i] > 0.0).collect();
    let cols: Vec<usize> = (0..col_budget.len()).filter(|&j| col_budget[j] > 0.0).collect();
    let (r, c) = (rows.len(), cols.len());
    if r == 0 || c == 0 {
        return 0.0;
    }
    let nodes = r + c;
    let edges: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).collect();
    let need = nodes - 1;

    struct Ctx<'a> {
        edges: &'a [(usize, usize)],
        r: usize,
        rows: &'a [usize],
        cols: &'a [usize],
        row_budget: &'a [f64],
        col_budget: &'a [f64],
        cost: &'a dyn Fn(usize, usize) -> f64,
        best: f64,
    }

    // Rollback union-find (union by size, no compression).
    struct Dsu {
        parent: Vec<usize>,
        size: Vec<usize>,
        trail: Vec<usize>,
    }
    impl Dsu {
        fn find(&self, mut x: usize) -> usize {
            while self.parent[x] != x {
                x = self.parent[x];
            }
            x
        }
        fn union(&mut self, a: usize, b: usize) -> bool {
            let (mut ra, mut rb) = (self.find(a), self.find(b));
            if ra == rb {
                return false;
            }
            if self.size[ra] > self.size[rb] {
                std::mem::swap(&mut ra, &mut rb);
            }
            self.parent[ra] = rb;
            self.size[rb] += self.size[ra];
            self.trail.push(ra);
            true
        }
        fn rollback(&mut self, mark: usize) {
            while self.trail.len() > mark {
                let ra = self.trail.pop().unwrap();
                let rb = self.parent[ra];
                self.size[rb] -= self.size[ra];
                self.parent[ra] = ra;
            }
        }
    }

    fn evaluate(ctx: &mut Ctx, chosen: &[usize]) {
        // Leaf elimination on the tree gives the unique basic flow.
        let nodes = ctx.r + ctx.cols.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
        for &e in chosen {
            let (i, j) = ctx.edges[e];
            adj[i].push((e, ctx.r + j));
            adj[ctx.r + j].push((e, i));
        }
        let mut residual: Vec<f64> = (0..nodes)
            .map(|v| {
                if v < ctx.r {
                    ctx.row_budget[ctx.rows[v]]
                } else {
                    ctx.col_budget[ctx.cols[v - ctx.r]]
                }
            })
            .collect();
        let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
        let mut removed_edge = vec![false; ctx.edges.len()];
        let mut removed_node = vec![false; nodes];
        let mut queue: Vec<usize> = (0..nodes).filter(|&v| degree[v] == 1).collect();
        let mut value = 0.0;
        let mut feasible = true;
        let mut processed = 0;
        while let Some(v) = queue.pop() {
            if removed_node[v] {
                continue;
            }
            removed_node[v] = true;
            processed += 1;
            let Some(&(e, w)) = adj[v].iter().find(|&&(e, _)| !removed_edge[e]) else {
                continue;
            };
            removed_edge[e] = true;
            let f = residual[v];
            if f < -1e-12 {
                feasible = false;
                break;
            }
            let (i, j) = ctx.edges[e];
            value += f.max(0.0) * (ctx.cost)(ctx.rows[i], ctx.cols[j]);
            residual[w] -= f;
            residual[v] = 0.0;
            degree[w] -= 1;
            if degree[w] == 1 {
                queue.push(w);
            }
        }
        if feasible && processed >= nodes - 1 && value < ctx.best {
            ctx.best = value;
        }
    }

    fn rec(ctx: &mut Ctx, dsu: &mut Dsu, next: usize, chosen: &mut Vec<usize>, need: usize) {
        if chosen.len() == need {
            evaluate(ctx, chosen);
            return;
        }
        if ctx.edges.len() - next < need - chosen.len() {
            return;
        }
        // Take edge `next` when it joins two components, then skip it.
        let (i, j) = ctx.edges[next];
        let mark = dsu.trail.len();
        if dsu.union(i, ctx.r + j) {
            chosen.push(next);
            rec(ctx, dsu, next + 1, chosen, need);
            chosen.pop();
            dsu.rollback(mark);
        }
        rec(ctx, dsu, next + 1, chosen, need);
    }

    let mut ctx = Ctx {
        edges: &edges,
        r,
        rows: &rows,
        cols: &cols,
        row_budget,
        col_budget,
        cost,
        best: f64::INFINITY,
    };
    let mut dsu = Dsu { parent: (0..nodes).collect(), size: vec![1; nodes], trail: Vec::new() };
    rec(&mut ctx, &mut dsu, 0, &mut Vec::new(), need);
    ctx.best
}

/// Minimum assignment value for uniform marginals `total/n`: vertices of the
/// doubly stochastic polytope are permutation matrices.
pub fn assignment_oracle(n: usize, per_point_mass: f64, cost: &dyn Fn(usize, usize) -> f64) -> f64 {
    fn rec(
        n: usize,
        row: usize,
        used: &mut [bool],
        prefix: f64,
        best: &mut f64,
        cost: &dyn Fn(usize, usize) -> f64,
    ) {
        if prefix >= *best {
            return;
        }
        if row == n {
            *best = prefix;
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                rec(n, row + 1, used, prefix + cost(row, j), best, cost);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(n, 0, &mut vec![false; n], 0.0, &mut best, cost);
    best * per_point_mass
}

/// Strictly positive probability weights.
pub fn random_marginal(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = w.iter().sum();
    for x in &mut w {
        *x /= sum;
    }
    let drift = 1.0 - w.iter().sum::<f64>();
    w[0] += drift;
    w
}

pub fn random_instance(n: usize, uniform: bool, rng: &mut ChaCha8Rng) -> OtInstance {
    let costs: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let (r1, r2) = if uniform {
        (vec![1.0 / n as f64; n], vec![1.0 / n as f64; n])
    } else {
        (random_marginal(n, rng), random_marginal(n, rng))
    };
    OtInstance::new(
        CostMatrix::new(n, costs).unwrap(),
        DiscreteMarginal::probability(r1).unwrap(),
        DiscreteMarginal::probability(r2).unwrap(),
    )
    .unwrap()
}

/// Random 1-d squared-distance instance with unnormalized costs, plus its
/// support/weight vectors for the closed-form side.
pub fn random_1d_instance(n: usize, rng: &mut ChaCha8Rng) -> (OtInstance, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let wx = random_marginal(n, rng);
    let wy = random_marginal(n, rng);
    let costs: Vec<f64> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x - y) * (x - y)))
        .collect();
    let inst = OtInstance::new(
        CostMatrix::new(n, costs).unwrap(),
        DiscreteMarginal::probability(wx.clone()).unwrap(),
        DiscreteMarginal::probability(wy.clone()).unwrap(),
    )
    .unwrap();
    (inst, xs, wx, ys, wy)
}

pub fn points_1d(coords: Vec<f64>) -> Points {
    Points { dim: 1, coords }
}

/// Random null direction: a plan difference, a double-centered dense matrix,
/// or a sum of random cycles, chosen by `kind % 3`.
pub fn random_null_direction(n: usize, kind: u64, rng: &mut ChaCha8Rng) -> NullDirection {
    match kind % 3 {
        0 => {
            // Difference of two couplings of the same random marginals.
            let r1 = random_marginal(n, rng);
            let r2 = random_marginal(n, rng);
            let inst = OtInstance::new(
                CostMatrix::new(n, vec![0.0; n * n]).unwrap(),
                DiscreteMarginal::probability(r1).unwrap(),
                DiscreteMarginal::probability(r2).unwrap(),
            )
            .unwrap();
            let a = initial_plan_product(&inst).unwrap();
            let b = initial_plan_northwest(&inst).unwrap();
            null_from_difference(n, &a, &b)
        }
        1 => {
            // Double centering projects any dense matrix onto the null space.
            let raw: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut row_mean = vec![0.0; n];
            let mut col_mean = vec![0.0; n];
            let mut total = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let v = raw[i * n + j];
                    row_mean[i] += v / n as f64;
                    col_mean[j] += v / n as f64;
                    total += v / (n * n) as f64;
                }
            }
            NullDirection::new(
                n,
                (0..n).flat_map(|i| {
                    let (raw, row_mean, col_mean) = (&raw, &row_mean, &col_mean);
                    (0..n).map(move |j| {
                        (i as u32, j as u32, raw[i * n + j] - row_mean[i] - col_mean[j] + total)
                    })
                }),
            )
        }
        _ => {
            // Sum of a few random (possibly overlapping) scaled 2-cycles.
            let mut acc = std::collections::BTreeMap::new();
            let parts = rng.gen_range(1..=3);
            for _ in 0..parts {
                let i0 = rng.gen_range(0..n as u32);
                let mut i1 = rng.gen_range(0..n as u32);
                while i1 == i0 {
                    i1 = rng.gen_range(0..n as u32);
                }
                let j0 = rng.gen_range(0..n as u32);
                let mut j1 = rng.gen_range(0..n as u32);
                while j1 == j0 {
                    j1 = rng.gen_range(0..n as u32);
                }
                let s = rng.gen_range(0.2..2.0);
                for (cell, v) in
                    [((i0, j0), s), ((i0, j1), -s), ((i1, j1), s), ((i1, j0), -s)]
                {
                    *acc.entry(cell).or_insert(0.0) += v;
                }
            }
            NullDirection::new(n, acc.into_iter().map(|((i, j), v)| (i, j, v)))
        }
    }
}

pub fn null_from_difference(n: usize, a: &TransportPlan, b: &TransportPlan) -> NullDirection {
    let _ = n;
    NullDirection::from_plan_difference(a, b)
}

/// Shortest alternating cycle (in rows touched) embedded in a working set,
/// by BFS over the bipartite cell graph; `None` when the set is a forest.
pub fn shortest_embedded_cycle(n: usize, cells: &[(u32, u32)]) -> Option<usize> {
    use std::collections::VecDeque;
    let nodes = 2 * n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (e, &(i, j)) in cells.iter().enumerate() {
        adj[i as usize].push(e);
        adj[n + j as usize].push(e);
    }
    let other = |e: usize, v: usize| -> usize {
        let (i, j) = cells[e];
        let (a, b) = (i as usize, n + j as usize);
        a + b - v
    };
    let mut best = usize::MAX;
    for start in 0..nodes {
        let mut dist = vec![usize::MAX; nodes];
        let mut via = vec![usize::MAX; nodes];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                if e == via[v] {
                    continue;
                }
                let w = other(e, v);
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    via[w] = e;
                    queue.push_back(w);
                } else if dist[w] + dist[v] + 1 < best {
                    // Cycle through start (or shorter elsewhere; BFS from all
                    // starts still finds the global girth).
                    best = dist[w] + dist[v] + 1;
                }
            }
        }
    }
    if best == usize::MAX {
        None
    } else {
        Some(best / 2)
    }
}

/// Peak resident set size of this process, from /proc.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    for line in status.lines() {
        if let Some(rest) = line.strip_prefix("VmHWM:") {
            let kb: u64 = rest.trim().trim_end_matches("kB").trim().parse().ok()?;
            return Some(kb * 1024);
        }
    }
    None
}
