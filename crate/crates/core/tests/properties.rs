//! Property-based invariants.

mod support;

use otbcd::nullspace::conformal_realization;
use otbcd::plan::{
    feasibility_error, initial_plan_northwest, initial_plan_product, objective, TransportPlan,
};
use otbcd::problem::{Cost, CostMatrix, DiscreteMarginal, OtInstance};
use otbcd::rng::stream_rng;
use proptest::prelude::*;

fn marginal_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|mut w| {
        let sum: f64 = w.iter().sum();
        for x in &mut w {
            *x /= sum;
        }
        let drift = 1.0 - w.iter().sum::<f64>();
        w[0] += drift;
        w
    })
}

fn instance_strategy() -> impl Strategy<Value = OtInstance> {
    (2usize..9).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..1.0, n * n),
            marginal_strategy(n),
            marginal_strategy(n),
        )
            .prop_map(move |(costs, r1, r2)| {
                OtInstance::new(
                    CostMatrix::new(n, costs).unwrap(),
                    DiscreteMarginal::probability(r1).unwrap(),
                    DiscreteMarginal::probability(r2).unwrap(),
                )
                .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn initializers_are_feasible(inst in instance_strategy()) {
        let product = initial_plan_product(&inst).unwrap();
        prop_assert!(feasibility_error(&product, inst.r1(), inst.r2()) <= 1e-12);
        let nw = initial_plan_northwest(&inst).unwrap();
        prop_assert!(feasibility_error(&nw, inst.r1(), inst.r2()) <= 1e-12);
        prop_assert!(nw.support_size() <= 2 * inst.n() - 1);
    }

    #[test]
    fn objective_is_linear(inst in instance_strategy(), alpha in 0.1f64..3.0, beta in 0.1f64..3.0) {
        let n = inst.n();
        let p = initial_plan_product(&inst).unwrap();
        let q = initial_plan_northwest(&inst).unwrap();
        let mut combined = TransportPlan::empty(n);
        for (i, j, m) in p.iter() {
            combined.insert(i, j, alpha * m);
        }
        for (i, j, m) in q.iter() {
            let prev = combined.mass_at(i, j);
            combined.insert(i, j, prev + beta * m);
        }
        let lhs = objective(&combined, inst.cost());
        let rhs = alpha * objective(&p, inst.cost()) + beta * objective(&q, inst.cost());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn rounding_output_is_exactly_feasible(
        inst in instance_strategy(),
        scale in 0.0f64..2.5,
        drop in 0usize..5,
    ) {
        // Perturb a feasible plan: rescale everything and drop a few cells.
        let base = initial_plan_product(&inst).unwrap();
        let mut perturbed = TransportPlan::empty(inst.n());
        for (k, (i, j, m)) in base.iter().enumerate() {
            if k % 7 == drop {
                continue;
            }
            perturbed.insert(i, j, scale * m);
        }
        let rounded = otbcd::round_to_feasible(&perturbed, inst.r1(), inst.r2()).unwrap();
        prop_assert!(feasibility_error(&rounded, inst.r1(), inst.r2()) <= 1e-12);
        let mass = rounded.total_mass();
        prop_assert!((mass - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn realization_resums_and_stays_conformal(seed in 0u64..400, n in 4usize..9) {
        let mut rng = stream_rng(seed, 3);
        let d = support::random_null_direction(n, seed, &mut rng);
        prop_assume!(!d.is_zero());
        let parts = conformal_realization(&d).unwrap();
        prop_assert!(parts.len() <= d.support_size().saturating_sub(3).max(1));
        let mut sum = std::collections::BTreeMap::new();
        for part in &parts {
            prop_assert!(part.is_simple_cycle());
            prop_assert!(part.cycle.len() >= 4);
            for (k, &(i, j)) in part.cycle.iter().enumerate() {
                let v = d.value_at(i, j);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                // Conformal: the part never exceeds or opposes d cellwise.
                prop_assert!(v * sign > 0.0, "sign clash at ({i},{j})");
                *sum.entry((i, j)).or_insert(0.0) += sign * part.scale;
            }
        }
        for (i, j, v) in d.iter() {
            let got = sum.get(&(i, j)).copied().unwrap_or(0.0);
            prop_assert!((got - v).abs() <= 1e-9, "cell ({i},{j}): {got} vs {v}");
        }
    }

    #[test]
    fn uniform_masses_round_trip_through_solver(inst in instance_strategy()) {
        // Exact solves conserve the marginals to working precision.
        let (plan, value) = otbcd::solve_full(&inst).unwrap();
        prop_assert!(feasibility_error(&plan, inst.r1(), inst.r2()) <= 1e-10);
        prop_assert!(value <= objective(&initial_plan_product(&inst).unwrap(), inst.cost()) + 1e-12);
        match inst.cost() {
            Cost::Dense(_) => {}
            Cost::Points(_) => prop_assert!(false, "strategy builds dense costs"),
        }
    }
}
