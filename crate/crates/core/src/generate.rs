//! Seeded random instances for tests and benchmarks.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Limit, MarkovGame, MarkovPolicy, MatrixGame, StrategyProfile};

/// Target support size relative to the action count `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportKind {
    /// `k = 1`.
    Pure,
    /// `k = max(1, m / 2)`.
    Half,
    /// `k = m`.
    Full,
}

impl SupportKind {
    pub const ALL: [SupportKind; 3] = [SupportKind::Pure, SupportKind::Half, SupportKind::Full];

    pub fn size(self, m: usize) -> usize {
        match self {
            SupportKind::Pure => 1,
            SupportKind::Half => (m / 2).max(1),
            SupportKind::Full => m,
        }
    }
}

/// Mixes `(seed, a, b)` into an independent stream seed (splitmix64
/// finalizer applied per component).
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ a) ^ b)
}

/// Dirichlet(1, ..., 1) sample of length `k`.
pub fn dirichlet_ones(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = x.iter().sum();
        // Guard against a draw so lopsided that an entry would fall below the
        // support threshold after normalization.
        if total > 0.0 && x.iter().all(|&v| v / total > 1e-9) {
            return x.into_iter().map(|v| v / total).collect();
        }
    }
}

fn uniform_matrix(rng: &mut impl Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..=1.0))
}

fn spread(rng: &mut impl Rng, n: usize, k: usize) -> Vec<f64> {
    let weights = dirichlet_ones(rng, k);
    let mut idx = sample(rng, n, k).into_vec();
    idx.sort_unstable();
    let mut v = vec![0.0; n];
    for (i, w) in idx.into_iter().zip(weights) {
        v[i] = w;
    }
    v
}

/// `m × m` game with `uniform[-1, 1]` payoffs and a Dirichlet target whose
/// row and column supports are drawn independently with the same size.
pub fn generate_random_normal(
    m: usize,
    kind: SupportKind,
    seed: u64,
) -> Result<(MatrixGame, StrategyProfile)> {
    if m == 0 {
        return Err(Error::InvalidRequest("need at least one action".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let game = MatrixGame::new(uniform_matrix(&mut rng, m, m), Limit::Finite(1.0))?;
    let k = kind.size(m);
    let p = spread(&mut rng, m, k);
    let q = spread(&mut rng, m, k);
    Ok((game, StrategyProfile::new(&p, &q)?))
}

/// Random Markov game with `uniform[-1, 1]` rewards, Dirichlet transitions
/// per joint action, a uniform initial distribution and full-support
/// Dirichlet stage targets.
pub fn generate_random_markov(
    states: usize,
    actions: usize,
    horizon: usize,
    seed: u64,
) -> Result<(MarkovGame, MarkovPolicy)> {
    if states == 0 || actions == 0 || horizon == 0 {
        return Err(Error::InvalidRequest(
            "states, actions and horizon must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rewards: Vec<Vec<DMatrix<f64>>> = (0..horizon)
        .map(|_| (0..states).map(|_| uniform_matrix(&mut rng, actions, actions)).collect())
        .collect();
    let transitions = (0..horizon - 1)
        .map(|_| {
            (0..states)
                .map(|_| {
                    (0..actions)
                        .map(|_| (0..actions).map(|_| dirichlet_ones(&mut rng, states)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let initial = vec![1.0 / states as f64; states];
    let game = MarkovGame::new(rewards, transitions, initial, Limit::Finite(1.0))?;
    let stages = (0..horizon)
        .map(|_| {
            (0..states)
                .map(|_| {
                    let p = dirichlet_ones(&mut rng, actions);
                    let q = dirichlet_ones(&mut rng, actions);
                    StrategyProfile::new(&p, &q)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((game, MarkovPolicy::new(stages)?))
}
