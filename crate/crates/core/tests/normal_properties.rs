mod common;

use common::*;
use gamemod_core::io::{from_json, GameFile};
use gamemod_core::uniqueness::{bordered_matrix, DEFAULT_MAX_DIM};
use gamemod_core::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn request(target: StrategyProfile) -> ModificationRequest<StrategyProfile> {
    ModificationRequest::new(target)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn erps_payoff_identities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 5);
        let k = k.min(4);
        let t = random_profile(&mut r, m, n, k);
        let e = build_erps(&t).unwrap();
        prop_assert!(e.matrix.iter().all(|x| (-1.0..=1.0).contains(x)));
        let row_payoffs = &e.matrix * t.q();
        let col_payoffs = t.p().transpose() * &e.matrix;
        for i in 0..m {
            let expected = if t.row_support().contains(&i) { 0.0 } else { -1.0 };
            prop_assert!((row_payoffs[i] - expected).abs() < 1e-10);
        }
        for j in 0..n {
            let expected = if t.col_support().contains(&j) { 0.0 } else { 1.0 };
            prop_assert!((col_payoffs[j] - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn erps_bordered_determinant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.random_range(1..=4usize);
        let t = random_profile(&mut r, k + 1, k + 1, k);
        let e = build_erps(&t).unwrap();
        let b = bordered_matrix(&e.matrix, t.row_support(), t.col_support());
        let p: Vec<f64> = t.row_support().iter().map(|&i| t.p()[i]).collect();
        let q: Vec<f64> = t.col_support().iter().map(|&j| t.q()[j]).collect();
        let closed = e.normalizer_c.powi(k as i32 - 1) / (p.iter().product::<f64>() * q.iter().product::<f64>());
        let det = b.determinant();
        prop_assert!((det.abs() - closed).abs() <= 1e-8 * closed, "det {det} closed form {closed}");
    }

    #[test]
    fn erps_target_is_unique(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 4);
        let t = random_profile(&mut r, m, n, k);
        let e = build_erps(&t).unwrap();
        let g = MatrixGame::new(e.matrix, Limit::Finite(1.0)).unwrap();
        prop_assert!(verify_unique_ne(&g, &t, Tolerances::default()).unwrap().valid);
        prop_assert!(enumerate_nash(&g, DEFAULT_MAX_DIM).unwrap().is_exactly(&t));
    }

    #[test]
    fn rap_output_is_certified_and_in_bounds(seed in any::<u64>(), bounded in any::<bool>()) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 5);
        let g = random_game(&mut r, m, n);
        let t = random_profile(&mut r, m, n, k);
        let bound = if bounded { Limit::Finite(1.0) } else { Limit::Unbounded };
        let lo = r.random_range(-0.5..0.4);
        let range = ValueRange::new(Limit::Finite(lo), Limit::Finite(lo + 0.1)).unwrap();
        let req = request(t.clone()).bound(bound).value_range(range).seed(seed);
        let out = rap(&g, &req).unwrap();
        prop_assert!(out.certificate.valid);
        prop_assert!(best_response_gap(out.modified.payoff(), t.p(), t.q()) < 1e-7);
        prop_assert!(out.achieved_value >= lo - 1e-7 && out.achieved_value <= lo + 0.1 + 1e-7);
        if bounded {
            prop_assert!(out.modified.payoff().iter().all(|x| x.abs() <= 1.0));
        }
        // The perturbation moves each entry by at most λ.
        let lambda = req.margin_reward;
        prop_assert!((&out.modified.payoff().clone() - &out.relaxed).amax() <= lambda + 1e-12);
        prop_assert!(out.cost <= out.relaxed_cost + lambda * (m * n) as f64 + 1e-9);
    }

    #[test]
    fn rap_is_seed_deterministic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 4);
        let g = random_game(&mut r, m, n);
        let t = random_profile(&mut r, m, n, k);
        let a = rap(&g, &request(t.clone()).seed(7)).unwrap();
        let b = rap(&g, &request(t).seed(7)).unwrap();
        prop_assert_eq!(a.modified, b.modified);
        prop_assert_eq!(a.epsilon, b.epsilon);
    }

    #[test]
    fn certificate_is_invariant_under_affine_maps(seed in any::<u64>(), scale in 0.25f64..4.0, shift in -2.0f64..2.0) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 4);
        let g = random_game(&mut r, m, n);
        let t = random_profile(&mut r, m, n, k);
        for game in [g.clone(), rap(&g, &request(t.clone()).seed(seed)).unwrap().modified] {
            let mapped = MatrixGame::new(game.payoff().map(|x| scale * x + shift), Limit::Unbounded).unwrap();
            let a = verify_unique_ne(&game, &t, Tolerances::default()).unwrap();
            let b = verify_unique_ne(&mapped, &t, Tolerances::default()).unwrap();
            prop_assert_eq!(a.valid, b.valid);
            prop_assert!((b.game_value - (scale * a.game_value + shift)).abs() < 1e-9);
        }
    }

    #[test]
    fn certificate_is_invariant_under_relabeling(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 5);
        let g = random_game(&mut r, m, n);
        let t = random_profile(&mut r, m, n, k);
        let mut rows: Vec<usize> = (0..m).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut r);
        cols.shuffle(&mut r);
        let relabeled = StrategyProfile::new(&permute_vec(t.p(), &rows), &permute_vec(t.q(), &cols)).unwrap();
        for game in [g.clone(), rap(&g, &request(t.clone()).seed(seed)).unwrap().modified] {
            let moved = MatrixGame::new(permute(game.payoff(), &rows, &cols), Limit::Unbounded).unwrap();
            let a = verify_unique_ne(&game, &t, Tolerances::default()).unwrap();
            let b = verify_unique_ne(&moved, &relabeled, Tolerances::default()).unwrap();
            prop_assert_eq!(a.valid, b.valid);
            prop_assert!((a.game_value - b.game_value).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate_agrees_with_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m, n, k) = random_dims(&mut r, 5);
        let g = random_game(&mut r, m, n);
        let t = random_profile(&mut r, m, n, k);
        let out = rap(&g, &request(t.clone()).seed(seed)).unwrap();
        let relaxed = MatrixGame::new(out.relaxed.clone(), Limit::Unbounded).unwrap();
        for game in [g, relaxed, out.modified] {
            let cert = verify_unique_ne(&game, &t, Tolerances::default()).unwrap();
            let found = enumerate_nash(&game, DEFAULT_MAX_DIM).unwrap();
            prop_assert_eq!(cert.valid, found.is_exactly(&t));
        }
    }

    #[test]
    fn game_json_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = MatrixGame::new(random_matrix(&mut r, 3, 4), Limit::Finite(1.0)).unwrap();
        let text = serde_json::to_string(&GameFile::from(&g)).unwrap();
        prop_assert_eq!(from_json::<GameFile>(&text).unwrap().to_game().unwrap(), g);
    }
}

#[test]
fn unequal_supports_are_rejected_before_solving() {
    let g = MatrixGame::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let t = StrategyProfile::new(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
    match rap(&g, &request(t)) {
        Err(Error::InfeasibleRequest(report)) => assert!(!report.feasible),
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn unreachable_value_range_is_infeasible() {
    let g = MatrixGame::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let t = StrategyProfile::uniform(2, 2).unwrap();
    let req = request(t).bound(Limit::Finite(1.0)).value_range(ValueRange::exactly(1.0));
    assert!(matches!(rap(&g, &req), Err(Error::InfeasibleRequest(_))));
}

#[test]
fn forever_cost_ignores_unplayed_entries() {
    // Only (NP, NP) is played, so a forever cost never charges anything.
    let g = MatrixGame::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let t = StrategyProfile::pure(2, 2, 1, 1).unwrap();
    let out = rap(&g, &request(t).cost(CostSpec::forever())).unwrap();
    assert!(out.certificate.valid);
    // Up to the slack the tie-break pass allows on the primary cost.
    assert!(out.cost.abs() < 1e-8, "cost {}", out.cost);
    // With one-time cost it is at least the switch-out fix on one entry.
    let t = StrategyProfile::pure(2, 2, 1, 1).unwrap();
    assert!(rap(&g, &request(t)).unwrap().cost >= 1.0);
}

#[test]
fn already_unique_target_costs_little() {
    // Matching pennies already has the uniform profile as its unique equilibrium.
    let g = MatrixGame::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
    let t = StrategyProfile::uniform(2, 2).unwrap();
    let out = rap(&g, &request(t)).unwrap();
    assert!(out.relaxed_cost < 1e-9);
    assert!(out.cost <= 4.0 * 0.01 + 1e-12);
}

#[test]
fn solve_zero_sum_matches_closed_form_two_by_two() {
    let mut r = rng(3);
    for _ in 0..50 {
        let a: DMatrix<f64> = random_matrix(&mut r, 2, 2);
        let g = MatrixGame::new(a.clone(), Limit::Unbounded).unwrap();
        let sol = solve_zero_sum(&g).unwrap();
        let (x, y, z, w) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
        let pure_lower = x.min(y).max(z.min(w));
        let pure_upper = x.max(z).min(y.max(w));
        let expected = if (pure_lower - pure_upper).abs() < 1e-15 {
            pure_lower
        } else {
            (x * w - y * z) / (x + w - y - z)
        };
        assert!((sol.value - expected).abs() < 1e-8, "{a} value {} expected {expected}", sol.value);
        let p = DVector::from_vec(sol.p.clone());
        let q = DVector::from_vec(sol.q.clone());
        assert!(best_response_gap(&a, &p, &q) < 1e-8);
    }
}
