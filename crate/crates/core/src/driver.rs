//! Iteration drivers: the plain randomized method, its refined selections,
//! the momentum-accelerated variant, and the inexact extension.

use std::time::Instant;

use rand_chacha::ChaCha8Rng;

use crate::baselines::round_to_feasible;
use crate::error::{OtError, Result};
use crate::plan::{
    feasibility_error, initial_plan_northwest, initial_plan_product, objective, TransportPlan,
};
use crate::problem::{Cost, OtInstance};
use crate::rng::{stream_rng, STREAM_SELECT};
use crate::select::{
    select_band, select_momentum, select_sdb, select_uniform, SelectorConfig,
    WorkingSet,
};
use crate::subsolver::{build_restricted, solve_transportation_with_tol, SolveMode, DEFAULT_OPT_TOL};
use crate::trajectory::{IterationRecord, SelectionKind, Trajectory};

/// Which working-set rule drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Uniform random working sets.
    Rbcd0,
    /// Permuted diagonal bands.
    Db,
    /// Band/submatrix mixture.
    Sdb,
    /// Mixture plus momentum-guided acceleration iterations.
    Arbcd,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Rbcd0 => "rbcd0",
            Variant::Db => "db",
            Variant::Sdb => "sdb",
            Variant::Arbcd => "arbcd",
        }
    }
}

/// Per-iteration subproblem accuracy for inexact runs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsSchedule {
    /// The same relative gap at every iteration.
    Constant { eps: f64 },
    /// `eps0 / k^alpha` at iteration k (1-based), with `alpha > 1`.
    PolyDecay { eps0: f64, alpha: f64 },
}

impl EpsSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EpsSchedule::Constant { eps } => {
                if !(0.0..1.0).contains(&eps) {
                    return Err(OtError::InvalidParameter(format!("eps {eps} outside [0, 1)")));
                }
            }
            EpsSchedule::PolyDecay { eps0, alpha } => {
                if !(0.0..1.0).contains(&eps0) {
                    return Err(OtError::InvalidParameter(format!("eps0 {eps0} outside [0, 1)")));
                }
                if alpha <= 1.0 {
                    return Err(OtError::InvalidParameter(format!("alpha {alpha} must exceed 1")));
                }
            }
        }
        Ok(())
    }

    pub fn at(&self, k: u64) -> f64 {
        match *self {
            EpsSchedule::Constant { eps } => eps,
            EpsSchedule::PolyDecay { eps0, alpha } => eps0 / ((k + 1) as f64).powf(alpha),
        }
    }
}

/// Optional early stop once `objective - f_star <= gap`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TargetGap {
    pub f_star: f64,
    pub gap: f64,
}

/// Driver configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    pub selector: SelectorConfig,
    pub variant: Variant,
    /// Inexact subproblem schedule; `None` solves subproblems exactly.
    pub inexact: Option<EpsSchedule>,
    pub max_iters: u64,
    pub target_gap: Option<TargetGap>,
    /// Pass every recorded iterate through feasibility rounding before
    /// measuring it (evaluation only; the solver state is untouched).
    pub round_each_iter: bool,
    /// Master seed for the run's selection stream.
    pub seed: u64,
    /// Reduced-cost tolerance of the subproblem solver.
    pub opt_tol: f64,
}

impl RunConfig {
    pub fn new(selector: SelectorConfig, variant: Variant, max_iters: u64, seed: u64) -> Self {
        Self {
            selector,
            variant,
            inexact: None,
            max_iters,
            target_gap: None,
            round_each_iter: false,
            seed,
            opt_tol: DEFAULT_OPT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.selector.validate()?;
        if self.max_iters == 0 {
            return Err(OtError::InvalidParameter("max_iters must be at least 1".into()));
        }
        if let Some(schedule) = &self.inexact {
            schedule.validate()?;
        }
        Ok(())
    }
}

/// Above this size the dense product start is replaced by the sparse
/// north-west coupling.
pub const NORTHWEST_THRESHOLD: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initializer {
    Product,
    Northwest,
}

/// The initializer a run of size n uses.
pub fn default_initializer(n: usize) -> Initializer {
    if n >= NORTHWEST_THRESHOLD {
        Initializer::Northwest
    } else {
        Initializer::Product
    }
}

pub fn initial_plan(instance: &OtInstance) -> Result<TransportPlan> {
    match default_initializer(instance.n()) {
        Initializer::Product => initial_plan_product(instance),
        Initializer::Northwest => initial_plan_northwest(instance),
    }
}

/// One block step: replaces the plan's mass on `ws` by an optimal (or
/// eps-optimal) redistribution and returns the objective change (never
/// positive). Marginals are conserved because the subproblem budgets are.
pub fn step(
    plan: &mut TransportPlan,
    cost: &Cost,
    ws: &WorkingSet,
    mode: SolveMode,
    opt_tol: f64,
) -> Result<f64> {
    let sub = build_restricted(plan, cost, ws)?;
    if sub.is_trivial() {
        return Ok(0.0);
    }
    let sol = solve_transportation_with_tol(&sub, mode, opt_tol)?;
    let delta = sol.value - sub.incoming_value();
    if delta >= 0.0 {
        // Zero (or rounding-level) improvement: keep the iterate unchanged.
        return Ok(0.0);
    }
    for &((i, j), _) in sub.incoming_cells() {
        plan.remove(i, j);
    }
    for &((i, j), mass) in &sol.flow {
        plan.insert(i, j, mass);
    }
    Ok(delta)
}

struct RunState {
    plan: TransportPlan,
    objective: f64,
    trajectory: Trajectory,
    started: Instant,
}

impl RunState {
    fn record(&mut self, instance: &OtInstance, iteration: u64, kind: SelectionKind, round: bool) -> Result<()> {
        let (obj, feas, support) = if round {
            let rounded = round_to_feasible(&self.plan, instance.r1(), instance.r2())?;
            (
                objective(&rounded, instance.cost()),
                feasibility_error(&rounded, instance.r1(), instance.r2()),
                rounded.support_size(),
            )
        } else {
            (
                self.objective,
                feasibility_error(&self.plan, instance.r1(), instance.r2()),
                self.plan.support_size(),
            )
        };
        self.trajectory.push(IterationRecord {
            iteration,
            objective: obj,
            feasibility_error: feas,
            support,
            kind,
            elapsed_secs: self.started.elapsed().as_secs_f64(),
        });
        Ok(())
    }

    fn reached(&self, target: &Option<TargetGap>) -> bool {
        target.map(|t| self.objective - t.f_star <= t.gap).unwrap_or(false)
    }
}

/// Runs the configured variant from the default initial plan.
pub fn run(instance: &OtInstance, config: &RunConfig) -> Result<(TransportPlan, Trajectory)> {
    let start = initial_plan(instance)?;
    run_from(instance, config, start)
}

/// Runs from an explicit feasible starting plan.
pub fn run_from(
    instance: &OtInstance,
    config: &RunConfig,
    start: TransportPlan,
) -> Result<(TransportPlan, Trajectory)> {
    config.validate()?;
    if config.variant == Variant::Arbcd {
        return run_arbcd_from(instance, config, start);
    }
    let mut rng = stream_rng(config.seed, STREAM_SELECT);
    let cost = instance.cost();
    let mut state = RunState {
        objective: objective(&start, cost),
        plan: start,
        trajectory: Trajectory::new(),
        started: Instant::now(),
    };
    state.record(instance, 0, initial_kind(config.variant), config.round_each_iter)?;
    for k in 0..config.max_iters {
        if state.reached(&config.target_gap) {
            break;
        }
        let ws = select_for(config.variant, &config.selector, &mut rng)?;
        let kind = ws.kind();
        let mode = mode_at(config, k);
        let delta = step(&mut state.plan, cost, &ws, mode, config.opt_tol)?;
        state.objective += delta;
        state.record(instance, k + 1, kind, config.round_each_iter)?;
    }
    Ok((state.plan, state.trajectory))
}

fn initial_kind(variant: Variant) -> SelectionKind {
    match variant {
        Variant::Rbcd0 => SelectionKind::Uniform,
        Variant::Db => SelectionKind::Band,
        Variant::Sdb | Variant::Arbcd => SelectionKind::Submatrix,
    }
}

fn select_for(variant: Variant, cfg: &SelectorConfig, rng: &mut ChaCha8Rng) -> Result<WorkingSet> {
    match variant {
        Variant::Rbcd0 => select_uniform(cfg, rng),
        Variant::Db => select_band(cfg, rng),
        Variant::Sdb => select_sdb(cfg, rng),
        Variant::Arbcd => select_sdb(cfg, rng),
    }
}

fn mode_at(config: &RunConfig, k: u64) -> SolveMode {
    match &config.inexact {
        None => SolveMode::Exact,
        Some(schedule) => SolveMode::Inexact { relative_gap: schedule.at(k) },
    }
}

/// Momentum bookkeeping of the accelerated variant.
#[derive(Debug, Clone)]
pub struct MomentumState {
    pub x_start: TransportPlan,
    pub x_end: TransportPlan,
    pub acc: bool,
}

/// The accelerated variant: every `T`-th iteration draws its working set
/// from the support of `x_end - x_start` (the recent displacement) instead
/// of the band/submatrix mixture, provided that support is larger than the
/// submatrix budget.
pub fn run_arbcd(instance: &OtInstance, config: &RunConfig) -> Result<(TransportPlan, Trajectory)> {
    let start = initial_plan(instance)?;
    run_arbcd_from(instance, config, start)
}

fn run_arbcd_from(
    instance: &OtInstance,
    config: &RunConfig,
    start: TransportPlan,
) -> Result<(TransportPlan, Trajectory)> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, STREAM_SELECT);
    let cost = instance.cost();
    let t_interval = config.selector.accel_interval;
    let m2 = config.selector.submatrix_dim * config.selector.submatrix_dim;
    let mut momentum = MomentumState { x_start: start.clone(), x_end: start.clone(), acc: false };
    let mut state = RunState {
        objective: objective(&start, cost),
        plan: start,
        trajectory: Trajectory::new(),
        started: Instant::now(),
    };
    state.record(instance, 0, SelectionKind::Submatrix, config.round_each_iter)?;
    for k in 0..config.max_iters {
        if state.reached(&config.target_gap) {
            break;
        }
        let ws = if (k + 1) % t_interval != 0 {
            momentum.acc = false;
            select_sdb(&config.selector, &mut rng)?
        } else {
            let diff = momentum.x_end.support_difference(&momentum.x_start);
            if diff.len() <= m2 {
                momentum.acc = false;
                select_sdb(&config.selector, &mut rng)?
            } else {
                momentum.acc = true;
                select_momentum(instance.n(), &diff, config.selector.submatrix_dim, &mut rng)?
            }
        };
        let kind = ws.kind();
        let mode = mode_at(config, k);
        let delta = step(&mut state.plan, cost, &ws, mode, config.opt_tol)?;
        state.objective += delta;
        momentum.x_end = state.plan.clone();
        if momentum.acc {
            momentum.x_start = state.plan.clone();
        }
        state.record(instance, k + 1, kind, config.round_each_iter)?;
    }
    Ok((state.plan, state.trajectory))
}

/// As [`run`], but every recorded iterate is projected to exact feasibility
/// before metrics are taken.
pub fn run_with_rounding(instance: &OtInstance, config: &RunConfig) -> Result<(TransportPlan, Trajectory)> {
    let mut config = config.clone();
    config.round_each_iter = true;
    run(instance, &config)
}
