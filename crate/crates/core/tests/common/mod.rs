#![allow(dead_code)]

use gamemod_core::{MatrixGame, StrategyProfile};
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..=1.0))
}

pub fn random_game(rng: &mut impl Rng, m: usize, n: usize) -> MatrixGame {
    MatrixGame::new(random_matrix(rng, m, n), gamemod_core::Limit::Unbounded).unwrap()
}

fn spread(rng: &mut impl Rng, n: usize, k: usize) -> Vec<f64> {
    // Keep weights away from zero so supports are unambiguous.
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut v = vec![0.0; n];
    for (i, x) in sample(rng, n, k).into_iter().zip(w) {
        v[i] = x / total;
    }
    v
}

/// Profile with both supports of size `k`.
pub fn random_profile(rng: &mut impl Rng, m: usize, n: usize, k: usize) -> StrategyProfile {
    StrategyProfile::new(&spread(rng, m, k), &spread(rng, n, k)).unwrap()
}

/// `(m, n, k)` with `2 <= m, n <= max_dim` and `1 <= k <= min(m, n)`.
pub fn random_dims(rng: &mut impl Rng, max_dim: usize) -> (usize, usize, usize) {
    let m = rng.random_range(2..=max_dim);
    let n = rng.random_range(2..=max_dim);
    let k = rng.random_range(1..=m.min(n));
    (m, n, k)
}

/// Largest unilateral gain against `profile`, computed from scratch.
pub fn best_response_gap(payoff: &DMatrix<f64>, p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    let v = (p.transpose() * payoff * q)[(0, 0)];
    let row_best = (payoff * q).max();
    let col_best = (p.transpose() * payoff).min();
    (row_best - v).max(v - col_best)
}

pub fn permute(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(rows[i], cols[j])])
}

pub fn permute_vec(v: &DVector<f64>, idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}
