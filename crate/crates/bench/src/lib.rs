//! Fixed instances shared by the benchmarks.

use gamemod_core::generate::{generate_random_markov, generate_random_normal, SupportKind};
use gamemod_core::{MarkovGame, MarkovPolicy, MatrixGame, ModificationRequest, StrategyProfile};

pub const SEED: u64 = 2024;

pub fn normal_case(m: usize, kind: SupportKind) -> (MatrixGame, ModificationRequest<StrategyProfile>) {
    let (game, target) = generate_random_normal(m, kind, SEED).expect("valid size");
    let request = ModificationRequest::new(target).bound(game.bound()).seed(SEED);
    (game, request)
}

/// Ten states, two actions, as in the horizon-scaling grid.
pub fn markov_case(horizon: usize) -> (MarkovGame, ModificationRequest<MarkovPolicy>) {
    let (game, policy) = generate_random_markov(10, 2, horizon, SEED).expect("valid size");
    let request = ModificationRequest::new(policy).bound(game.bound()).seed(SEED);
    (game, request)
}
