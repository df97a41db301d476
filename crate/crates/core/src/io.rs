//! JSON file formats.
//!
//! Unbounded limits (`bound`, value-range endpoints, switch-out gaps) are
//! written as `null`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::erps::ErpsGame;
use crate::error::{Error, Result};
use crate::markov::{MarkovModificationResult, MpeVerification};
use crate::normal::ModificationResult;
use crate::types::{
    CostSpec, Limit, MarkovGame, MarkovPolicy, MatrixGame, ModificationRequest, SolverStats,
    StrategyProfile, ValueRange, DEFAULT_MARGIN,
};
use crate::uniqueness::UniquenessCertificate;

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn matrix_of(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 || n == 0 {
        return Err(Error::Shape("matrix has no entries".into()));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("matrix rows have different lengths".into()));
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub payoff: Vec<Vec<f64>>,
    #[serde(default)]
    pub bound: Option<f64>,
}

impl GameFile {
    pub fn to_game(&self) -> Result<MatrixGame> {
        MatrixGame::new(matrix_of(&self.payoff)?, Limit::from(self.bound))
    }
}

impl From<&MatrixGame> for GameFile {
    fn from(g: &MatrixGame) -> Self {
        Self {
            payoff: g.to_rows(),
            bound: g.bound().finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl ProfileFile {
    pub fn to_profile(&self) -> Result<StrategyProfile> {
        StrategyProfile::new(&self.p, &self.q)
    }
}

impl From<&StrategyProfile> for ProfileFile {
    fn from(pr: &StrategyProfile) -> Self {
        Self {
            p: pr.p().iter().copied().collect(),
            q: pr.q().iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovGameFile {
    #[serde(rename = "H")]
    pub horizon: usize,
    #[serde(rename = "S")]
    pub states: usize,
    #[serde(rename = "A1")]
    pub rows: usize,
    #[serde(rename = "A2")]
    pub cols: usize,
    /// `[h][s]` reward matrices.
    pub rewards: Vec<Vec<Vec<Vec<f64>>>>,
    /// `[h][s][i][j][s']` for the first `H - 1` periods.
    pub transitions: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    pub initial: Vec<f64>,
    #[serde(default)]
    pub bound: Option<f64>,
}

impl MarkovGameFile {
    pub fn to_game(&self) -> Result<MarkovGame> {
        let rewards = self
            .rewards
            .iter()
            .map(|stage| stage.iter().map(|r| matrix_of(r)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let game = MarkovGame::new(
            rewards,
            self.transitions.clone(),
            self.initial.clone(),
            Limit::from(self.bound),
        )?;
        let declared = (self.horizon, self.states, (self.rows, self.cols));
        let actual = (game.horizon(), game.num_states(), game.action_dims());
        if declared != actual {
            return Err(Error::Shape(format!(
                "header says H={} S={} A={:?} but data is H={} S={} A={:?}",
                declared.0, declared.1, declared.2, actual.0, actual.1, actual.2
            )));
        }
        Ok(game)
    }
}

impl From<&MarkovGame> for MarkovGameFile {
    fn from(g: &MarkovGame) -> Self {
        let (rows, cols) = g.action_dims();
        Self {
            horizon: g.horizon(),
            states: g.num_states(),
            rows,
            cols,
            rewards: g.rewards().iter().map(|st| st.iter().map(rows_of).collect()).collect(),
            transitions: g.transitions_nested(),
            initial: g.initial().to_vec(),
            bound: g.bound().finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovPolicyFile {
    /// `[h][s][i]`.
    pub p: Vec<Vec<Vec<f64>>>,
    /// `[h][s][j]`.
    pub q: Vec<Vec<Vec<f64>>>,
}

impl MarkovPolicyFile {
    pub fn to_policy(&self) -> Result<MarkovPolicy> {
        if self.p.len() != self.q.len() {
            return Err(Error::Shape("p and q have different horizons".into()));
        }
        let stages = self
            .p
            .iter()
            .zip(&self.q)
            .map(|(ps, qs)| {
                if ps.len() != qs.len() {
                    return Err(Error::Shape("p and q have different state counts".into()));
                }
                ps.iter()
                    .zip(qs)
                    .map(|(p, q)| StrategyProfile::new(p, q))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MarkovPolicy::new(stages)
    }
}

impl From<&MarkovPolicy> for MarkovPolicyFile {
    fn from(pol: &MarkovPolicy) -> Self {
        let pick = |f: fn(&StrategyProfile) -> Vec<f64>| -> Vec<Vec<Vec<f64>>> {
            pol.stages().iter().map(|st| st.iter().map(f).collect()).collect()
        };
        Self {
            p: pick(|pr| pr.p().iter().copied().collect()),
            q: pick(|pr| pr.q().iter().copied().collect()),
        }
    }
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

/// Request parameters other than the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestFile {
    #[serde(default)]
    pub value_lo: Option<f64>,
    #[serde(default)]
    pub value_hi: Option<f64>,
    #[serde(default)]
    pub bound: Option<f64>,
    #[serde(default)]
    pub cost: CostSpec,
    #[serde(default = "default_margin")]
    pub iota: f64,
    #[serde(default = "default_margin")]
    pub lambda: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RequestFile {
    fn default() -> Self {
        Self {
            value_lo: None,
            value_hi: None,
            bound: None,
            cost: CostSpec::OneTimeL1,
            iota: DEFAULT_MARGIN,
            lambda: DEFAULT_MARGIN,
            seed: 0,
        }
    }
}

impl RequestFile {
    pub fn to_request<T>(&self, target: T) -> Result<ModificationRequest<T>> {
        let range = ValueRange::new(Limit::from(self.value_lo), Limit::from(self.value_hi))?;
        Ok(ModificationRequest::new(target)
            .value_range(range)
            .bound(Limit::from(self.bound))
            .cost(self.cost.clone())
            .margins(self.iota, self.lambda)
            .seed(self.seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalResultFile {
    pub modified: GameFile,
    pub relaxed: Vec<Vec<f64>>,
    pub value: f64,
    pub relaxed_cost: f64,
    pub cost: f64,
    pub epsilon: f64,
    pub certificate: UniquenessCertificate,
    pub notes: Vec<String>,
    pub stats: SolverStats,
}

impl From<&ModificationResult> for NormalResultFile {
    fn from(r: &ModificationResult) -> Self {
        Self {
            modified: GameFile::from(&r.modified),
            relaxed: rows_of(&r.relaxed),
            value: r.achieved_value,
            relaxed_cost: r.relaxed_cost,
            cost: r.cost,
            epsilon: r.epsilon,
            certificate: r.certificate,
            notes: r.feasibility.notes.clone(),
            stats: r.stats.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovVerificationFile {
    pub valid: bool,
    pub value: f64,
    /// `[h][s]` values recomputed by backward induction.
    pub stage_values: Vec<Vec<f64>>,
    pub certificates: Vec<Vec<UniquenessCertificate>>,
}

impl From<&MpeVerification> for MarkovVerificationFile {
    fn from(v: &MpeVerification) -> Self {
        Self {
            valid: v.valid,
            value: v.v0(),
            stage_values: v.decomposition.values.clone(),
            certificates: v.certificates.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovResultFile {
    pub modified: MarkovGameFile,
    pub value: f64,
    /// `[h][s]` values from the relaxed program.
    pub stage_values: Vec<Vec<f64>>,
    pub relaxed_cost: f64,
    pub cost: f64,
    pub epsilons: Vec<Vec<f64>>,
    pub bellman_residual: f64,
    pub verification: MarkovVerificationFile,
    pub notes: Vec<String>,
    pub stats: SolverStats,
}

impl From<&MarkovModificationResult> for MarkovResultFile {
    fn from(r: &MarkovModificationResult) -> Self {
        Self {
            modified: MarkovGameFile::from(&r.modified),
            value: r.achieved_value,
            stage_values: r.stage_values.clone(),
            relaxed_cost: r.relaxed_cost,
            cost: r.cost,
            epsilons: r.epsilons.clone(),
            bellman_residual: r.bellman_residual,
            verification: MarkovVerificationFile::from(&r.verification),
            notes: r.feasibility.notes.clone(),
            stats: r.stats.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErpsFile {
    pub matrix: Vec<Vec<f64>>,
    pub normalizer_c: f64,
    pub support_size_k: usize,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

impl From<&ErpsGame> for ErpsFile {
    fn from(e: &ErpsGame) -> Self {
        Self {
            matrix: rows_of(&e.matrix),
            normalizer_c: e.normalizer_c,
            support_size_k: e.support_size_k,
            row_perm: e.row_perm.clone(),
            col_perm: e.col_perm.clone(),
        }
    }
}

/// Matrix as comma-separated rows.
pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// A normal-form example: game, target and request parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalCase {
    pub name: String,
    pub game: GameFile,
    pub target: ProfileFile,
    #[serde(default)]
    pub request: RequestFile,
}

impl NormalCase {
    pub fn load(
        &self,
    ) -> Result<(MatrixGame, ModificationRequest<StrategyProfile>)> {
        let game = self.game.to_game()?;
        let request = self.request.to_request(self.target.to_profile()?)?;
        Ok((game, request))
    }
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidRequest(format!("bad JSON: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbounded_is_null() {
        let g = MatrixGame::from_rows(&[vec![1.0]]).unwrap();
        let text = serde_json::to_string(&GameFile::from(&g)).unwrap();
        assert_eq!(text, r#"{"payoff":[[1.0]],"bound":null}"#);
        let back: GameFile = from_json(r#"{"payoff":[[1.0]]}"#).unwrap();
        assert_eq!(back.to_game().unwrap(), g);
    }

    #[test]
    fn request_defaults() {
        let r: RequestFile = from_json("{}").unwrap();
        assert_eq!(r, RequestFile::default());
        let r: RequestFile =
            from_json(r#"{"cost": {"kind": "forever"}, "value_lo": 0, "value_hi": 0}"#).unwrap();
        assert_eq!(r.cost, CostSpec::forever());
        let req = r.to_request(()).unwrap();
        assert_eq!(req.value_range, ValueRange::exactly(0.0));
    }

    #[test]
    fn markov_header_must_match() {
        let text = r#"{"H": 2, "S": 1, "A1": 1, "A2": 1,
            "rewards": [[[[0.5]]], [[[0.25]]]],
            "transitions": [[[[[1.0]]]]],
            "initial": [1.0], "bound": null}"#;
        let f: MarkovGameFile = from_json(text).unwrap();
        let g = f.to_game().unwrap();
        assert_eq!(MarkovGameFile::from(&g), f);
        let mut bad = f.clone();
        bad.states = 2;
        assert!(matches!(bad.to_game(), Err(Error::Shape(_))));
    }

    #[test]
    fn gaps_serialize_as_null_when_unbounded() {
        let g = MatrixGame::from_rows(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]])
            .unwrap();
        let c = crate::uniqueness::verify_unique_ne(
            &g,
            &StrategyProfile::uniform(3, 3).unwrap(),
            Default::default(),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(c).unwrap();
        assert!(v["row_sow_gap"].is_null());
        assert_eq!(v["valid"], true);
    }
}
