//! Extended rock-paper-scissors: a game in which any equal-support profile
//! is the unique equilibrium, with value 0.

use log::warn;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::types::StrategyProfile;

/// Support probabilities below this produce a conditioning warning.
const SMALL_PROBABILITY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ErpsGame {
    pub matrix: DMatrix<f64>,
    /// Scale `c` keeping the support block inside `[-1, 1]`.
    pub normalizer_c: f64,
    pub support_size_k: usize,
    /// `row_perm[r]` is the original row placed at position `r` of the
    /// canonical layout (support first, ascending; then the rest ascending).
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

fn canonical_order(support: &[usize], n: usize) -> Vec<usize> {
    let mut order = support.to_vec();
    order.extend((0..n).filter(|i| !support.contains(i)));
    order
}

/// Builds the extended rock-paper-scissors game for `profile`. The profile's
/// length fixes the action counts.
pub fn build_erps(profile: &StrategyProfile) -> Result<ErpsGame> {
    let (m, n) = profile.dims();
    let rows = profile.row_support();
    let cols = profile.col_support();
    if rows.len() != cols.len() {
        return Err(Error::UnequalSupports {
            rows: rows.len(),
            cols: cols.len(),
        });
    }
    let k = rows.len();
    let p: Vec<f64> = rows.iter().map(|&i| profile.p()[i]).collect();
    let q: Vec<f64> = cols.iter().map(|&j| profile.q()[j]).collect();
    let smallest = p.iter().chain(&q).copied().fold(f64::INFINITY, f64::min);
    if smallest < SMALL_PROBABILITY {
        warn!("target support probability {smallest:e} is tiny; the perturbation game is ill-conditioned");
    }

    let c = if k == 1 {
        1.0
    } else {
        (0..k)
            .map(|i| (p[i] * q[(i + 1) % k]).min(p[i] * q[(i + 2) % k]))
            .fold(f64::INFINITY, f64::min)
    };

    let mut canon = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            canon[(i, j)] = match (i < k, j < k) {
                (true, true) if k > 1 => {
                    if j == (i + 2) % k {
                        c / (p[i] * q[j])
                    } else if j == (i + 1) % k {
                        -c / (p[i] * q[j])
                    } else {
                        0.0
                    }
                }
                (true, true) => 0.0,
                (true, false) => 1.0,
                (false, true) => -1.0,
                (false, false) => 0.0,
            };
        }
    }
    // Rounding in c / (p q) can land a hair outside the unit box.
    canon.apply(|x| *x = x.clamp(-1.0, 1.0));

    let row_perm = canonical_order(rows, m);
    let col_perm = canonical_order(cols, n);
    let mut matrix = DMatrix::zeros(m, n);
    for (r, &oi) in row_perm.iter().enumerate() {
        for (s, &oj) in col_perm.iter().enumerate() {
            matrix[(oi, oj)] = canon[(r, s)];
        }
    }
    Ok(ErpsGame {
        matrix,
        normalizer_c: c,
        support_size_k: k,
        row_perm,
        col_perm,
    })
}
