//! Domain types shared by every solver: games, strategies, policies,
//! modification requests and their results.
//!
//! All types validate on construction and are immutable afterwards, so they
//! can be shared freely between threads.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities at or below this are treated as zero.
pub const SUPPORT_EPSILON: f64 = 1e-12;

/// Probability vectors whose sum is off by at most this much are
/// re-normalized; larger deviations are rejected.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A real limit that may be absent.
///
/// Used for payoff bounds, value-range endpoints and switch-out gaps. On the
/// wire an unbounded limit is `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub enum Limit {
    Finite(f64),
    Unbounded,
}

impl Limit {
    pub fn finite(self) -> Option<f64> {
        match self {
            Limit::Finite(x) => Some(x),
            Limit::Unbounded => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Limit::Finite(_))
    }
}

impl From<Option<f64>> for Limit {
    fn from(value: Option<f64>) -> Self {
        match value {
            Some(x) if x.is_finite() => Limit::Finite(x),
            _ => Limit::Unbounded,
        }
    }
}

impl From<Limit> for Option<f64> {
    fn from(value: Limit) -> Self {
        value.finite()
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(x) => write!(f, "{x}"),
            Limit::Unbounded => f.write_str("inf"),
        }
    }
}

/// Closed target interval for the game value. Unbounded endpoints extend to
/// minus/plus infinity respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub lo: Limit,
    pub hi: Limit,
}

impl ValueRange {
    pub fn new(lo: Limit, hi: Limit) -> Result<Self> {
        for x in [lo, hi].into_iter().filter_map(Limit::finite) {
            if !x.is_finite() {
                return Err(Error::InvalidRequest("value range endpoint is NaN".into()));
            }
        }
        if let (Limit::Finite(a), Limit::Finite(b)) = (lo, hi) {
            if a > b {
                return Err(Error::InvalidRequest(format!(
                    "value range is empty: lo {a} > hi {b}"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn free() -> Self {
        Self {
            lo: Limit::Unbounded,
            hi: Limit::Unbounded,
        }
    }

    pub fn exactly(v: f64) -> Self {
        Self {
            lo: Limit::Finite(v),
            hi: Limit::Finite(v),
        }
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.finite().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.finite().unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo_f64() - tol && v <= self.hi_f64() + tol
    }

    pub fn is_free(&self) -> bool {
        !self.lo.is_finite() && !self.hi.is_finite()
    }
}

impl Default for ValueRange {
    fn default() -> Self {
        Self::free()
    }
}

/// Indices of `v` with probability above [`SUPPORT_EPSILON`].
pub fn support(v: &[f64]) -> Result<Vec<usize>> {
    let idx: Vec<usize> = v
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > SUPPORT_EPSILON)
        .map(|(i, _)| i)
        .collect();
    if idx.is_empty() {
        return Err(Error::InvalidStrategy("empty support".into()));
    }
    Ok(idx)
}

/// Validates a probability vector, zeroes entries below the support
/// threshold and re-normalizes.
pub fn normalize_probabilities(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::InvalidStrategy("empty probability vector".into()));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidStrategy(format!(
            "probability entry {x} is negative or not finite"
        )));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidStrategy(format!(
            "probabilities sum to {sum}, not 1"
        )));
    }
    let trimmed: Vec<f64> = v
        .iter()
        .map(|&x| if x > SUPPORT_EPSILON { x } else { 0.0 })
        .collect();
    let total: f64 = trimmed.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidStrategy("empty support".into()));
    }
    Ok(rescale_to_one(trimmed, total))
}

/// Divides by `total` unless it is already 1 to within rounding, so that
/// normalizing a normalized vector leaves it bit-for-bit unchanged.
fn rescale_to_one(v: Vec<f64>, total: f64) -> Vec<f64> {
    if (total - 1.0).abs() <= 1e-12 {
        v
    } else {
        v.into_iter().map(|x| x / total).collect()
    }
}

/// Payoff matrix of a finite two-player zero-sum game. The row player
/// maximizes.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    payoff: DMatrix<f64>,
    bound: Limit,
}

impl MatrixGame {
    pub fn new(payoff: DMatrix<f64>, bound: Limit) -> Result<Self> {
        if payoff.nrows() == 0 || payoff.ncols() == 0 {
            return Err(Error::InvalidGame("payoff matrix has no actions".into()));
        }
        if payoff.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGame("payoff entry is not finite".into()));
        }
        if let Limit::Finite(b) = bound {
            if !(b > 0.0) {
                return Err(Error::InvalidGame(format!("bound {b} must be positive")));
            }
            if let Some(x) = payoff.iter().find(|x| x.abs() > b) {
                return Err(Error::InvalidGame(format!(
                    "payoff entry {x} outside [-{b}, {b}]"
                )));
            }
        }
        Ok(Self { payoff, bound })
    }

    /// Unbounded game from row vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows_bounded(rows, Limit::Unbounded)
    }

    pub fn from_rows_bounded(rows: &[Vec<f64>], bound: Limit) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("payoff rows have different lengths".into()));
        }
        let payoff = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Self::new(payoff, bound)
    }

    pub fn payoff(&self) -> &DMatrix<f64> {
        &self.payoff
    }

    pub fn bound(&self) -> Limit {
        self.bound
    }

    pub fn rows(&self) -> usize {
        self.payoff.nrows()
    }

    pub fn cols(&self) -> usize {
        self.payoff.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.payoff.shape()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows())
            .map(|i| self.payoff.row(i).iter().copied().collect())
            .collect()
    }

    /// Same payoffs with a different bound (validated).
    pub fn with_bound(&self, bound: Limit) -> Result<Self> {
        Self::new(self.payoff.clone(), bound)
    }

    pub(crate) fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.p().len() != self.rows() || profile.q().len() != self.cols() {
            return Err(Error::Shape(format!(
                "profile has {}x{} actions but game is {}x{}",
                profile.p().len(),
                profile.q().len(),
                self.rows(),
                self.cols()
            )));
        }
        Ok(())
    }
}

/// A pair of mixed strategies with their supports.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    p: DVector<f64>,
    q: DVector<f64>,
    row_support: Vec<usize>,
    col_support: Vec<usize>,
}

impl StrategyProfile {
    pub fn new(p: &[f64], q: &[f64]) -> Result<Self> {
        let p = normalize_probabilities(p)?;
        let q = normalize_probabilities(q)?;
        let row_support = support(&p)?;
        let col_support = support(&q)?;
        Ok(Self {
            p: DVector::from_vec(p),
            q: DVector::from_vec(q),
            row_support,
            col_support,
        })
    }

    /// Both players mix uniformly over `n` actions.
    pub fn uniform(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidStrategy("no actions".into()));
        }
        Self::new(
            &vec![1.0 / rows as f64; rows],
            &vec![1.0 / cols as f64; cols],
        )
    }

    pub fn pure(rows: usize, cols: usize, i: usize, j: usize) -> Result<Self> {
        if i >= rows || j >= cols {
            return Err(Error::InvalidStrategy(format!(
                "pure action ({i}, {j}) outside {rows}x{cols}"
            )));
        }
        let mut p = vec![0.0; rows];
        let mut q = vec![0.0; cols];
        p[i] = 1.0;
        q[j] = 1.0;
        Self::new(&p, &q)
    }

    pub fn p(&self) -> &DVector<f64> {
        &self.p
    }

    pub fn q(&self) -> &DVector<f64> {
        &self.q
    }

    pub fn row_support(&self) -> &[usize] {
        &self.row_support
    }

    pub fn col_support(&self) -> &[usize] {
        &self.col_support
    }

    pub fn supports_equal(&self) -> bool {
        self.row_support.len() == self.col_support.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.p.len(), self.q.len())
    }

    /// Largest coordinate-wise difference to another profile of the same
    /// shape; infinite when the shapes differ.
    pub fn distance(&self, other: &StrategyProfile) -> f64 {
        if self.dims() != other.dims() {
            return f64::INFINITY;
        }
        let dp = (&self.p - &other.p).amax();
        let dq = (&self.q - &other.q).amax();
        dp.max(dq)
    }
}

/// `pᵀ R q`.
pub fn expected_payoff(game: &MatrixGame, profile: &StrategyProfile) -> Result<f64> {
    game.check_profile(profile)?;
    Ok(profile.p().dot(&(game.payoff() * profile.q())))
}

/// Horizon-`H` zero-sum Markov game.
///
/// Periods are 0-based internally: period `h` here is period `h + 1` in the
/// usual 1-based notation. Transitions exist for periods `0..H-1`; the last
/// period has none.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovGame {
    horizon: usize,
    num_states: usize,
    action_dims: (usize, usize),
    /// `[h][s]`, flattened as `((i * n) + j) * S + s'`.
    transitions: Vec<Vec<Vec<f64>>>,
    initial: Vec<f64>,
    /// `[h][s]`.
    rewards: Vec<Vec<DMatrix<f64>>>,
    bound: Limit,
}

impl MarkovGame {
    /// `transitions[h][s][i][j]` is the next-state distribution for periods
    /// `h < H - 1`.
    pub fn new(
        rewards: Vec<Vec<DMatrix<f64>>>,
        transitions: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
        initial: Vec<f64>,
        bound: Limit,
    ) -> Result<Self> {
        let horizon = rewards.len();
        if horizon == 0 {
            return Err(Error::InvalidGame("horizon must be positive".into()));
        }
        let num_states = rewards[0].len();
        if num_states == 0 {
            return Err(Error::InvalidGame("no states".into()));
        }
        let (m, n) = rewards[0][0].shape();
        if m == 0 || n == 0 {
            return Err(Error::InvalidGame("reward matrix has no actions".into()));
        }
        for (h, stage) in rewards.iter().enumerate() {
            if stage.len() != num_states {
                return Err(Error::Shape(format!(
                    "period {h} has {} states, expected {num_states}",
                    stage.len()
                )));
            }
            for (s, r) in stage.iter().enumerate() {
                if r.shape() != (m, n) {
                    return Err(Error::Shape(format!(
                        "reward ({h}, {s}) is {:?}, expected {m}x{n}",
                        r.shape()
                    )));
                }
                if r.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidGame(format!(
                        "reward ({h}, {s}) has a non-finite entry"
                    )));
                }
                if let Limit::Finite(b) = bound {
                    if let Some(x) = r.iter().find(|x| x.abs() > b) {
                        return Err(Error::InvalidGame(format!(
                            "reward ({h}, {s}) entry {x} outside [-{b}, {b}]"
                        )));
                    }
                }
            }
        }
        if let Limit::Finite(b) = bound {
            if !(b > 0.0) {
                return Err(Error::InvalidGame(format!("bound {b} must be positive")));
            }
        }
        if transitions.len() != horizon - 1 {
            return Err(Error::Shape(format!(
                "expected {} transition periods, got {}",
                horizon - 1,
                transitions.len()
            )));
        }
        let mut flat = Vec::with_capacity(horizon - 1);
        for (h, period) in transitions.iter().enumerate() {
            if period.len() != num_states {
                return Err(Error::Shape(format!(
                    "transition period {h} has {} states",
                    period.len()
                )));
            }
            let mut per_state = Vec::with_capacity(num_states);
            for (s, by_row) in period.iter().enumerate() {
                if by_row.len() != m || by_row.iter().any(|r| r.len() != n) {
                    return Err(Error::Shape(format!(
                        "transition ({h}, {s}) is not {m}x{n}"
                    )));
                }
                let mut cell = Vec::with_capacity(m * n * num_states);
                for (i, row) in by_row.iter().enumerate() {
                    for (j, dist) in row.iter().enumerate() {
                        if dist.len() != num_states {
                            return Err(Error::Shape(format!(
                                "transition ({h}, {s}, {i}, {j}) has {} next states",
                                dist.len()
                            )));
                        }
                        let dist = normalize_distribution(dist).map_err(|e| {
                            Error::InvalidGame(format!("transition ({h}, {s}, {i}, {j}): {e}"))
                        })?;
                        cell.extend(dist);
                    }
                }
                per_state.push(cell);
            }
            flat.push(per_state);
        }
        if initial.len() != num_states {
            return Err(Error::Shape(format!(
                "initial distribution has {} states, expected {num_states}",
                initial.len()
            )));
        }
        let initial = normalize_distribution(&initial)
            .map_err(|e| Error::InvalidGame(format!("initial distribution: {e}")))?;
        Ok(Self {
            horizon,
            num_states,
            action_dims: (m, n),
            transitions: flat,
            initial,
            rewards,
            bound,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn action_dims(&self) -> (usize, usize) {
        self.action_dims
    }

    pub fn bound(&self) -> Limit {
        self.bound
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn reward(&self, h: usize, s: usize) -> &DMatrix<f64> {
        &self.rewards[h][s]
    }

    pub fn rewards(&self) -> &[Vec<DMatrix<f64>>] {
        &self.rewards
    }

    /// Next-state distribution after joint action `(i, j)` in state `s` of
    /// period `h`. Panics for the last period.
    pub fn transition(&self, h: usize, s: usize, i: usize, j: usize) -> &[f64] {
        let n = self.action_dims.1;
        let k = self.num_states;
        let start = (i * n + j) * k;
        &self.transitions[h][s][start..start + k]
    }

    /// Nested `[h][s][i][j][s']` copy of the transitions.
    pub fn transitions_nested(&self) -> Vec<Vec<Vec<Vec<Vec<f64>>>>> {
        let (m, n) = self.action_dims;
        (0..self.horizon.saturating_sub(1))
            .map(|h| {
                (0..self.num_states)
                    .map(|s| {
                        (0..m)
                            .map(|i| (0..n).map(|j| self.transition(h, s, i, j).to_vec()).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Same dynamics with replaced rewards.
    pub fn with_rewards(&self, rewards: Vec<Vec<DMatrix<f64>>>, bound: Limit) -> Result<Self> {
        Self::new(rewards, self.transitions_nested(), self.initial.clone(), bound)
    }

    /// Expected continuation `Σ_{s'} P_h(s'|s, i, j) · next[s']` for every joint
    /// action; zero in the last period.
    pub fn continuation(&self, h: usize, s: usize, next: &[f64]) -> DMatrix<f64> {
        let (m, n) = self.action_dims;
        if h + 1 >= self.horizon {
            return DMatrix::zeros(m, n);
        }
        DMatrix::from_fn(m, n, |i, j| {
            self.transition(h, s, i, j)
                .iter()
                .zip(next)
                .map(|(p, v)| p * v)
                .sum()
        })
    }
}

fn normalize_distribution(v: &[f64]) -> Result<Vec<f64>> {
    if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidGame(format!(
            "probability {x} is negative or not finite"
        )));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidGame(format!("probabilities sum to {sum}")));
    }
    Ok(rescale_to_one(v.to_vec(), sum))
}

/// One strategy profile per period and state.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovPolicy {
    stages: Vec<Vec<StrategyProfile>>,
}

impl MarkovPolicy {
    pub fn new(stages: Vec<Vec<StrategyProfile>>) -> Result<Self> {
        let Some(first) = stages.first() else {
            return Err(Error::InvalidStrategy("policy has no periods".into()));
        };
        let states = first.len();
        let Some(dims) = first.first().map(StrategyProfile::dims) else {
            return Err(Error::InvalidStrategy("policy has no states".into()));
        };
        for (h, stage) in stages.iter().enumerate() {
            if stage.len() != states {
                return Err(Error::Shape(format!(
                    "policy period {h} has {} states, expected {states}",
                    stage.len()
                )));
            }
            if let Some(s) = stage.iter().position(|pr| pr.dims() != dims) {
                return Err(Error::Shape(format!(
                    "policy stage ({h}, {s}) has mismatched action counts"
                )));
            }
        }
        Ok(Self { stages })
    }

    pub fn stage(&self, h: usize, s: usize) -> &StrategyProfile {
        &self.stages[h][s]
    }

    pub fn stages(&self) -> &[Vec<StrategyProfile>] {
        &self.stages
    }

    pub fn horizon(&self) -> usize {
        self.stages.len()
    }

    pub fn num_states(&self) -> usize {
        self.stages[0].len()
    }

    pub fn action_dims(&self) -> (usize, usize) {
        self.stages[0][0].dims()
    }

    pub(crate) fn check_game(&self, game: &MarkovGame) -> Result<()> {
        if self.horizon() != game.horizon()
            || self.num_states() != game.num_states()
            || self.action_dims() != game.action_dims()
        {
            return Err(Error::Shape(format!(
                "policy is H={} S={} A={:?} but game is H={} S={} A={:?}",
                self.horizon(),
                self.num_states(),
                self.action_dims(),
                game.horizon(),
                game.num_states(),
                game.action_dims()
            )));
        }
        Ok(())
    }
}

/// Modification cost `ℓ(R, R°)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    /// Unweighted L1 distance between reward tables.
    #[default]
    OneTimeL1,
    /// L1 distance weighted by the target's joint play probabilities
    /// `p_i q_j` (per stage for Markov games). `weights`, when given,
    /// replaces the derived weights entry for entry, flattened row-major
    /// (stage-major for Markov games).
    Forever {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

impl CostSpec {
    pub fn forever() -> Self {
        CostSpec::Forever { weights: None }
    }

    pub(crate) fn validate_override(&self, expected_len: usize) -> Result<()> {
        if let CostSpec::Forever { weights: Some(w) } = self {
            if w.len() != expected_len {
                return Err(Error::InvalidCost(format!(
                    "weight override has {} entries, expected {expected_len}",
                    w.len()
                )));
            }
            if let Some(x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::InvalidCost(format!("weight {x} is negative or not finite")));
            }
        }
        Ok(())
    }

    /// Weights for one reward table under target `profile`, row-major.
    /// `offset` locates the table inside an override vector.
    pub(crate) fn table_weights(&self, profile: &StrategyProfile, offset: usize) -> Vec<f64> {
        let (m, n) = profile.dims();
        match self {
            CostSpec::OneTimeL1 => vec![1.0; m * n],
            CostSpec::Forever { weights: Some(w) } => w[offset..offset + m * n].to_vec(),
            CostSpec::Forever { weights: None } => (0..m)
                .flat_map(|i| (0..n).map(move |j| profile.p()[i] * profile.q()[j]))
                .collect(),
        }
    }

    /// `ℓ(R, R°)` for a single table.
    pub fn evaluate(
        &self,
        modified: &DMatrix<f64>,
        original: &DMatrix<f64>,
        profile: &StrategyProfile,
    ) -> f64 {
        let w = self.table_weights(profile, 0);
        weighted_l1(modified, original, &w)
    }
}

pub(crate) fn weighted_l1(a: &DMatrix<f64>, b: &DMatrix<f64>, row_major_weights: &[f64]) -> f64 {
    let n = a.ncols();
    let mut total = 0.0;
    for i in 0..a.nrows() {
        for j in 0..n {
            total += row_major_weights[i * n + j] * (a[(i, j)] - b[(i, j)]).abs();
        }
    }
    total
}

pub const DEFAULT_MARGIN: f64 = 0.01;

/// Everything the modifier asks for besides the original game.
///
/// `T` is a [`StrategyProfile`] for normal-form games or a [`MarkovPolicy`]
/// for Markov games.
#[derive(Debug, Clone, PartialEq)]
pub struct ModificationRequest<T> {
    pub target: T,
    pub value_range: ValueRange,
    pub bound: Limit,
    pub cost: CostSpec,
    /// Switch-out-worse margin ι.
    pub margin_sow: f64,
    /// Reward-bound headroom and perturbation half-width λ.
    pub margin_reward: f64,
    pub rng_seed: u64,
}

impl<T> ModificationRequest<T> {
    pub fn new(target: T) -> Self {
        Self {
            target,
            value_range: ValueRange::free(),
            bound: Limit::Unbounded,
            cost: CostSpec::OneTimeL1,
            margin_sow: DEFAULT_MARGIN,
            margin_reward: DEFAULT_MARGIN,
            rng_seed: 0,
        }
    }

    pub fn value_range(mut self, range: ValueRange) -> Self {
        self.value_range = range;
        self
    }

    pub fn bound(mut self, bound: Limit) -> Self {
        self.bound = bound;
        self
    }

    pub fn cost(mut self, cost: CostSpec) -> Self {
        self.cost = cost;
        self
    }

    pub fn margins(mut self, sow: f64, reward: f64) -> Self {
        self.margin_sow = sow;
        self.margin_reward = reward;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.margin_sow > 0.0 && self.margin_sow.is_finite()) {
            return Err(Error::InvalidRequest(format!(
                "switch-out margin {} must be positive",
                self.margin_sow
            )));
        }
        if !(self.margin_reward > 0.0 && self.margin_reward.is_finite()) {
            return Err(Error::InvalidRequest(format!(
                "reward margin {} must be positive",
                self.margin_reward
            )));
        }
        if let Limit::Finite(b) = self.bound {
            if !(b > 0.0) {
                return Err(Error::InvalidRequest(format!("bound {b} must be positive")));
            }
        }
        ValueRange::new(self.value_range.lo, self.value_range.hi)?;
        Ok(())
    }
}

/// Solver bookkeeping. Contains no wall-clock data so results stay
/// reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub lp_variables: usize,
    pub lp_constraints: usize,
    pub lp_iterations: u64,
    /// Perturbation draws rejected before a certificate validated.
    pub redraws: usize,
}
