mod common;

use common::*;
use gamemod_core::lp::{solve_lp, solve_lp_with, AbsEncoding, LpModel, LpStatus, Relation};
use gamemod_core::normal::build_relaxed_program;
use gamemod_core::{Limit, ModificationRequest};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn l1_projection_onto_a_box(targets in prop::collection::vec(-3.0f64..3.0, 1..8), lo in -2.0f64..0.0, width in 0.0f64..2.0) {
        let hi = lo + width;
        let mut model = LpModel::new();
        let xs: Vec<_> = targets.iter().enumerate().map(|(i, _)| model.add_var(format!("x{i}"), lo, hi).unwrap()).collect();
        model.encode_abs_cost(xs.iter().zip(&targets).map(|(&x, &c)| (x, c, 1.0))).unwrap();
        for encoding in [AbsEncoding::Auto, AbsEncoding::Epigraph] {
            let sol = solve_lp_with(&model, encoding).unwrap();
            prop_assert_eq!(sol.status, LpStatus::Optimal);
            let expected: f64 = targets.iter().map(|&c| (lo - c).max(c - hi).max(0.0)).sum();
            prop_assert!((sol.objective - expected).abs() < 1e-8, "{} vs {}", sol.objective, expected);
        }
    }

    #[test]
    fn encodings_agree_on_relaxed_programs(seed in any::<u64>(), bounded in any::<bool>()) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 5);
        let g = random_game(&mut r, m, n);
        let t = random_profile(&mut r, m, n, k);
        let bound = if bounded { Limit::Finite(1.0) } else { Limit::Unbounded };
        let program = build_relaxed_program(&g, &ModificationRequest::new(t).bound(bound)).unwrap();
        let a = solve_lp_with(&program.model, AbsEncoding::Auto).unwrap();
        let b = solve_lp_with(&program.model, AbsEncoding::Epigraph).unwrap();
        prop_assert!(a.is_optimal() && b.is_optimal());
        prop_assert!((a.objective - b.objective).abs() <= 1e-7 * a.objective.abs().max(1.0));
        prop_assert!((a.abs_cost(&program.model, program.cost) - a.objective).abs() <= 1e-7 * a.objective.abs().max(1.0));
    }

    #[test]
    fn objective_scales_linearly(seed in any::<u64>(), alpha in 0.1f64..10.0) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 4);
        let g = random_game(&mut r, m, n);
        let t = random_profile(&mut r, m, n, k);
        let program = build_relaxed_program(&g, &ModificationRequest::new(t)).unwrap();
        let base = solve_lp(&program.model).unwrap().objective;
        let mut scaled = program.model.clone();
        scaled.scale_objective(alpha).unwrap();
        let got = solve_lp(&scaled).unwrap().objective;
        prop_assert!((got - alpha * base).abs() <= 1e-7 * (alpha * base).abs().max(1.0));
    }
}

#[test]
fn infeasible_and_unbounded_are_reported() {
    let mut model = LpModel::new();
    let x = model.add_var("x", 0.0, 1.0).unwrap();
    model.add_constraint([(x, 1.0)], Relation::Ge, 2.0).unwrap();
    assert_eq!(solve_lp(&model).unwrap().status, LpStatus::Infeasible);

    let mut model = LpModel::new();
    let x = model.free_var("x");
    model.add_objective(x, 1.0).unwrap();
    assert_eq!(solve_lp(&model).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn lp_dump_names_every_row() {
    let mut r = rng(1);
    let g = random_game(&mut r, 3, 3);
    let t = random_profile(&mut r, 3, 3, 2);
    let program = build_relaxed_program(&g, &ModificationRequest::new(t)).unwrap();
    let mut out = Vec::new();
    program.model.write_lp(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("Minimize"));
    assert!(text.contains("Subject To"));
    assert!(text.trim_end().ends_with("End"));
}
