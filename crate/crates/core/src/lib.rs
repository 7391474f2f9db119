//! Exact discrete optimal transport by randomized block coordinate descent.
//!
//! The transportation LP is attacked directly, without entropic
//! regularization: each iteration restricts the problem to a small random
//! working set of plan cells, solves the induced transportation subproblem
//! exactly (or inexactly) with a network simplex, and applies the step. The
//! crate bundles the selection rules (uniform, diagonal band, submatrix,
//! their mixture, and momentum-guided acceleration), the null-space
//! machinery behind them, a log-domain Sinkhorn baseline with feasibility
//! rounding, reproducible dataset generators, and a 1-d closed-form oracle.

pub mod baselines;
pub mod datasets;
pub mod driver;
pub mod error;
pub mod nullspace;
pub mod plan;
pub mod problem;
pub mod rng;
pub mod select;
pub mod subsolver;
pub mod trajectory;

pub use baselines::{closed_form_1d, round_to_feasible, sinkhorn_logdomain, DualPotentials};
pub use datasets::{cost_from_points, generate, DatasetSpec, Family, GeneratedInstance, Points};
pub use driver::{
    run, run_arbcd, run_with_rounding, step, EpsSchedule, Initializer, RunConfig, TargetGap,
    Variant,
};
pub use error::{OtError, Result};
pub use nullspace::{
    conformal_realization, find_elementary_conformal, rate_bound_log, ElementaryMatrix,
    NullDirection, RateBounds,
};
pub use plan::{
    feasibility_error, initial_plan_northwest, initial_plan_product, objective, TransportPlan,
    PRUNE_THRESHOLD,
};
pub use problem::{Cost, CostMatrix, DiscreteMarginal, OtInstance, PointCost};
pub use select::{SelectorConfig, WorkingSet};
pub use subsolver::{
    build_restricted, solve_full, solve_transportation, RestrictedSubproblem, SolveMode,
    SolveStatus, SubSolution,
};
pub use trajectory::{estimate_vhat, IterationRecord, SelectionKind, Trajectory};
