//! Baselines: log-domain Sinkhorn with feasibility rounding, and the
//! closed-form 1-d solver used as a fast oracle for large instances.

use std::time::Instant;

use crate::error::{OtError, Result};
use crate::plan::{feasibility_error, TransportPlan};
use crate::problem::{DiscreteMarginal, OtInstance};
use crate::trajectory::{IterationRecord, SelectionKind, Trajectory};

/// Row and column scaling potentials of the entropic dual.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPotentials {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// Entropy regularization strength.
    pub epsilon: f64,
}

/// Scales rows down to their budgets, then columns, then spreads the
/// remaining deficit as a rank-one correction. The output is exactly
/// feasible; feasible input passes through unchanged.
pub fn round_to_feasible(
    plan: &TransportPlan,
    r1: &DiscreteMarginal,
    r2: &DiscreteMarginal,
) -> Result<TransportPlan> {
    let n = plan.n();
    if r1.len() != n || r2.len() != n {
        return Err(OtError::DimensionMismatch("marginal lengths differ from plan size".into()));
    }
    let rows = plan.row_sums();
    let row_scale: Vec<f64> =
        rows.iter().zip(r1.weights()).map(|(&s, &r)| if s > r { r / s } else { 1.0 }).collect();
    let mut col_after = vec![0.0; n];
    for (i, j, m) in plan.iter() {
        col_after[j as usize] += m * row_scale[i as usize];
    }
    let col_scale: Vec<f64> = col_after
        .iter()
        .zip(r2.weights())
        .map(|(&s, &r)| if s > r { r / s } else { 1.0 })
        .collect();

    let mut out = TransportPlan::empty(n);
    let mut row_deficit: Vec<f64> = r1.weights().to_vec();
    let mut col_deficit: Vec<f64> = r2.weights().to_vec();
    for (i, j, m) in plan.iter() {
        let scaled = m * row_scale[i as usize] * col_scale[j as usize];
        if scaled > 0.0 {
            out.insert(i, j, scaled);
            row_deficit[i as usize] -= scaled;
            col_deficit[j as usize] -= scaled;
        }
    }
    let total_deficit: f64 = row_deficit.iter().sum();
    if total_deficit <= 1e-15 * r1.total().max(1.0) {
        return Ok(out);
    }
    for i in 0..n {
        let rd = row_deficit[i];
        if rd <= 0.0 {
            continue;
        }
        for j in 0..n {
            let cd = col_deficit[j];
            if cd <= 0.0 {
                continue;
            }
            let add = rd * cd / total_deficit;
            if add > 0.0 {
                let prev = out.mass_at(i as u32, j as u32);
                out.insert(i as u32, j as u32, prev + add);
            }
        }
    }
    Ok(out)
}

fn logsumexp(values: impl Iterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = values.collect();
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = vals.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Entropic-regularized solver, fully in log space. The regularization is
/// `gamma = epsilon_accuracy / (4 log n)`; row potentials update first. At
/// every `record_every`-th sweep the scaled plan is rounded to feasibility
/// and measured; the returned plan is the rounded final iterate.
pub fn sinkhorn_logdomain(
    instance: &OtInstance,
    epsilon_accuracy: f64,
    max_iters: u64,
    record_every: u64,
) -> Result<(TransportPlan, Trajectory)> {
    let n = instance.n();
    if n < 2 {
        return Err(OtError::InvalidParameter("need n >= 2".into()));
    }
    if !(epsilon_accuracy > 0.0) {
        return Err(OtError::InvalidParameter("epsilon_accuracy must be positive".into()));
    }
    let r1 = instance.r1().weights();
    let r2 = instance.r2().weights();
    if r1.iter().chain(r2.iter()).any(|&w| w <= 0.0) {
        return Err(OtError::InvalidParameter(
            "marginals must be strictly positive (drop zero-mass points first)".into(),
        ));
    }
    let gamma = epsilon_accuracy / (4.0 * (n as f64).ln());
    if gamma < 1e-12 {
        return Err(OtError::InvalidParameter(format!("regularization {gamma:e} underflows")));
    }
    let record_every = record_every.max(1);
    let cost = instance.cost().to_dense();
    let log_r1: Vec<f64> = r1.iter().map(|w| w.ln()).collect();
    let log_r2: Vec<f64> = r2.iter().map(|w| w.ln()).collect();
    let mut pot = DualPotentials { f: vec![0.0; n], g: vec![0.0; n], epsilon: gamma };
    let mut trajectory = Trajectory::new();
    let started = Instant::now();
    let mut final_plan = None;
    for iter in 1..=max_iters {
        for i in 0..n {
            let lse = logsumexp((0..n).map(|j| (pot.g[j] - cost.at(i, j)) / gamma));
            pot.f[i] = gamma * (log_r1[i] - lse);
        }
        for j in 0..n {
            let lse = logsumexp((0..n).map(|i| (pot.f[i] - cost.at(i, j)) / gamma));
            pot.g[j] = gamma * (log_r2[j] - lse);
        }
        if iter % record_every == 0 || iter == max_iters {
            let rounded = round_to_feasible(&scaled_plan(&pot, &cost, gamma)?, instance.r1(), instance.r2())?;
            let obj = crate::plan::objective(&rounded, instance.cost());
            trajectory.push(IterationRecord {
                iteration: iter,
                objective: obj,
                feasibility_error: feasibility_error(&rounded, instance.r1(), instance.r2()),
                support: rounded.support_size(),
                kind: SelectionKind::Sinkhorn,
                elapsed_secs: started.elapsed().as_secs_f64(),
            });
            if iter == max_iters {
                final_plan = Some(rounded);
            }
        }
    }
    let plan = match final_plan {
        Some(p) => p,
        None => round_to_feasible(&scaled_plan(&pot, &cost, gamma)?, instance.r1(), instance.r2())?,
    };
    Ok((plan, trajectory))
}

fn scaled_plan(pot: &DualPotentials, cost: &crate::problem::CostMatrix, gamma: f64) -> Result<TransportPlan> {
    let n = pot.f.len();
    let mut plan = TransportPlan::empty(n);
    for i in 0..n {
        for j in 0..n {
            let mass = ((pot.f[i] + pot.g[j] - cost.at(i, j)) / gamma).exp();
            if mass > 0.0 {
                plan.insert(i as u32, j as u32, mass);
            }
        }
    }
    Ok(plan)
}

/// Optimal 1-d transport for the squared-distance cost: sort both supports
/// and couple monotonically. Returns the plan in the original index order
/// and the optimal value.
pub fn closed_form_1d(
    x_support: &[f64],
    x_weights: &[f64],
    y_support: &[f64],
    y_weights: &[f64],
) -> Result<(TransportPlan, f64)> {
    if x_support.len() != x_weights.len() || y_support.len() != y_weights.len() {
        return Err(OtError::DimensionMismatch("support/weight lengths differ".into()));
    }
    if x_support.is_empty() || y_support.is_empty() {
        return Err(OtError::InvalidParameter("empty support".into()));
    }
    for (k, &w) in x_weights.iter().chain(y_weights.iter()).enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(OtError::NegativeEntry { index: k, value: w });
        }
    }
    let wx: f64 = x_weights.iter().sum();
    let wy: f64 = y_weights.iter().sum();
    if (wx - wy).abs() > 1e-12 * wx.abs().max(1.0) {
        return Err(OtError::UnbalancedTotals { left: wx, right: wy });
    }
    let mut xi: Vec<usize> = (0..x_support.len()).collect();
    let mut yi: Vec<usize> = (0..y_support.len()).collect();
    xi.sort_by(|&a, &b| x_support[a].total_cmp(&x_support[b]).then(a.cmp(&b)));
    yi.sort_by(|&a, &b| y_support[a].total_cmp(&y_support[b]).then(a.cmp(&b)));

    let n = x_support.len().max(y_support.len());
    let mut plan = TransportPlan::empty(n);
    let mut value = 0.0;
    let (mut a, mut b) = (0usize, 0usize);
    let mut rem_x = x_weights[xi[0]];
    let mut rem_y = y_weights[yi[0]];
    while a < xi.len() && b < yi.len() {
        let mass = rem_x.min(rem_y);
        if mass > 0.0 {
            let (i, j) = (xi[a], yi[b]);
            let d = x_support[i] - y_support[j];
            value += mass * d * d;
            let prev = plan.mass_at(i as u32, j as u32);
            plan.insert(i as u32, j as u32, prev + mass);
        }
        rem_x -= mass;
        rem_y -= mass;
        if rem_x <= rem_y {
            a += 1;
            if a < xi.len() {
                rem_x = x_weights[xi[a]];
            }
        } else {
            b += 1;
            if b < yi.len() {
                rem_y = y_weights[yi[b]];
            }
        }
    }
    Ok((plan, value))
}
