//! Unique-equilibrium certificates, the minimax LP, and a support
//! enumeration oracle for small games.
//!
//! A profile `(p, q)` with supports `I`, `J` is the unique equilibrium of `R`
//! exactly when
//! - every on-support pure deviation earns the value (`R_I q = v`, `pᵀR_J = v`),
//! - every off-support pure deviation is strictly worse, and
//! - `|I| = |J|` and the bordered matrix `[[R_IJ, -1], [1ᵀ, 0]]` is invertible.

use itertools::Itertools;
use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpModel, LpStatus, Relation};
use crate::types::{expected_payoff, Limit, MatrixGame, StrategyProfile};

pub const DEFAULT_SII_TOL: f64 = 1e-7;
pub const DEFAULT_INV_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_DIM: usize = 6;

/// Two profiles closer than this (max-norm) are the same equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sii_tol: f64,
    pub inv_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sii_tol: DEFAULT_SII_TOL,
            inv_tol: DEFAULT_INV_TOL,
        }
    }
}

/// Indifference residuals and switch-out gaps of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiisowReport {
    pub game_value: f64,
    /// `max_{i∈I} |e_iᵀ R q - v|`.
    pub row_sii_residual: f64,
    /// `max_{j∈J} |pᵀ R e_j - v|`.
    pub col_sii_residual: f64,
    /// `min_{i∉I} (v - e_iᵀ R q)`; unbounded when `I` is every row.
    pub row_sow_gap: Limit,
    /// `min_{j∉J} (pᵀ R e_j - v)`; unbounded when `J` is every column.
    pub col_sow_gap: Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessCertificate {
    pub game_value: f64,
    pub row_sii_residual: f64,
    pub col_sii_residual: f64,
    pub row_sow_gap: Limit,
    pub col_sow_gap: Limit,
    /// Smallest singular value of the bordered support block; 0 when the
    /// supports differ in size.
    pub sigma_min: f64,
    pub supports_equal: bool,
    pub tolerances: Tolerances,
    pub valid: bool,
}

impl UniquenessCertificate {
    fn assemble(siisow: SiisowReport, sigma_min: f64, supports_equal: bool, tol: Tolerances) -> Self {
        let gap_ok = |g: Limit| g.finite().map_or(true, |x| x > 0.0);
        let valid = siisow.row_sii_residual <= tol.sii_tol
            && siisow.col_sii_residual <= tol.sii_tol
            && gap_ok(siisow.row_sow_gap)
            && gap_ok(siisow.col_sow_gap)
            && supports_equal
            && sigma_min > tol.inv_tol;
        Self {
            game_value: siisow.game_value,
            row_sii_residual: siisow.row_sii_residual,
            col_sii_residual: siisow.col_sii_residual,
            row_sow_gap: siisow.row_sow_gap,
            col_sow_gap: siisow.col_sow_gap,
            sigma_min,
            supports_equal,
            tolerances: tol,
            valid,
        }
    }

    /// The smaller of the two switch-out gaps.
    pub fn min_sow_gap(&self) -> Limit {
        match (self.row_sow_gap.finite(), self.col_sow_gap.finite()) {
            (Some(a), Some(b)) => Limit::Finite(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Limit::Finite(a),
            (None, None) => Limit::Unbounded,
        }
    }

    /// Human-readable list of the failed conditions; empty when valid.
    pub fn failures(&self) -> Vec<String> {
        let t = self.tolerances;
        let mut out = Vec::new();
        if self.row_sii_residual > t.sii_tol {
            out.push(format!("row indifference residual {:e}", self.row_sii_residual));
        }
        if self.col_sii_residual > t.sii_tol {
            out.push(format!("column indifference residual {:e}", self.col_sii_residual));
        }
        if let Some(g) = self.row_sow_gap.finite().filter(|g| *g <= 0.0) {
            out.push(format!("row switch-out gap {g:e}"));
        }
        if let Some(g) = self.col_sow_gap.finite().filter(|g| *g <= 0.0) {
            out.push(format!("column switch-out gap {g:e}"));
        }
        if !self.supports_equal {
            out.push("support sizes differ".into());
        } else if self.sigma_min <= t.inv_tol {
            out.push(format!("bordered matrix near singular (sigma_min {:e})", self.sigma_min));
        }
        out
    }
}

pub fn check_siisow(game: &MatrixGame, profile: &StrategyProfile) -> Result<SiisowReport> {
    let v = expected_payoff(game, profile)?;
    let r = game.payoff();
    let row_pay = r * profile.q();
    let col_pay = r.tr_mul(profile.p());
    let on_row = profile.row_support();
    let on_col = profile.col_support();

    let row_sii_residual = on_row
        .iter()
        .map(|&i| (row_pay[i] - v).abs())
        .fold(0.0, f64::max);
    let col_sii_residual = on_col
        .iter()
        .map(|&j| (col_pay[j] - v).abs())
        .fold(0.0, f64::max);
    let row_sow_gap = (0..game.rows())
        .filter(|i| !on_row.contains(i))
        .map(|i| v - row_pay[i])
        .reduce(f64::min)
        .map_or(Limit::Unbounded, Limit::Finite);
    let col_sow_gap = (0..game.cols())
        .filter(|j| !on_col.contains(j))
        .map(|j| col_pay[j] - v)
        .reduce(f64::min)
        .map_or(Limit::Unbounded, Limit::Finite);
    Ok(SiisowReport {
        game_value: v,
        row_sii_residual,
        col_sii_residual,
        row_sow_gap,
        col_sow_gap,
    })
}

/// `[[R_IJ, -1], [1ᵀ, 0]]` for a square support block.
pub fn bordered_matrix(payoff: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    let k = rows.len();
    debug_assert_eq!(k, cols.len());
    let mut b = DMatrix::zeros(k + 1, k + 1);
    for (a, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            b[(a, c)] = payoff[(i, j)];
        }
        b[(a, k)] = -1.0;
        b[(k, a)] = 1.0;
    }
    b
}

/// Returns `(sigma_min, supports_equal)`.
pub fn check_inv(game: &MatrixGame, profile: &StrategyProfile) -> Result<(f64, bool)> {
    game.check_profile(profile)?;
    if !profile.supports_equal() {
        return Ok((0.0, false));
    }
    let b = bordered_matrix(game.payoff(), profile.row_support(), profile.col_support());
    Ok((smallest_singular_value(b), true))
}

pub(crate) fn smallest_singular_value(m: DMatrix<f64>) -> f64 {
    m.svd(false, false).singular_values.min()
}

pub fn verify_unique_ne(
    game: &MatrixGame,
    profile: &StrategyProfile,
    tol: Tolerances,
) -> Result<UniquenessCertificate> {
    let siisow = check_siisow(game, profile)?;
    let (sigma_min, supports_equal) = check_inv(game, profile)?;
    Ok(UniquenessCertificate::assemble(siisow, sigma_min, supports_equal, tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumSolution {
    pub value: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Solves the maximin LP for the row player and the minimax LP for the
/// column player.
pub fn solve_zero_sum(game: &MatrixGame) -> Result<ZeroSumSolution> {
    let (row_value, p) = maximin(game.payoff())?;
    let (col_value, q) = maximin(&(-game.payoff().transpose()))?;
    let col_value = -col_value;
    let scale = game.payoff().amax().max(1.0);
    if (row_value - col_value).abs() > 1e-7 * scale {
        return Err(Error::NumericalFailure(format!(
            "maximin {row_value} and minimax {col_value} disagree"
        )));
    }
    Ok(ZeroSumSolution {
        value: 0.5 * (row_value + col_value),
        p,
        q,
    })
}

/// `max_{p∈Δ} min_j (pᵀR)_j`.
fn maximin(r: &DMatrix<f64>) -> Result<(f64, Vec<f64>)> {
    let (m, n) = r.shape();
    let mut model = LpModel::new();
    let p: Vec<_> = (0..m)
        .map(|i| model.add_var(format!("p{i}"), 0.0, 1.0))
        .collect::<Result<_>>()?;
    let v = model.free_var("v");
    for j in 0..n {
        let terms = (0..m).map(|i| (p[i], r[(i, j)])).chain([(v, -1.0)]);
        model.add_constraint(terms, Relation::Ge, 0.0)?;
    }
    model.add_constraint(p.iter().map(|&x| (x, 1.0)), Relation::Eq, 1.0)?;
    model.add_objective(v, -1.0)?;
    let sol = solve_lp(&model)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!("minimax LP is {}", sol.status)));
    }
    let raw: Vec<f64> = p.iter().map(|&x| sol.value(x).max(0.0)).collect();
    let total: f64 = raw.iter().sum();
    Ok((sol.value(v), raw.into_iter().map(|x| x / total).collect()))
}

/// Optimal-set widths up to this are read as a single point. The width LPs
/// relax optimality by `1e-9` (relative), and a unique but poorly conditioned
/// equilibrium amplifies that by the inverse of its switch-out gap times the
/// smallest singular value of its kernel, so widths of `1e-4` are routine
/// noise. Genuinely wider optimal sets also show up as several extreme
/// equilibria; this is a coarse second check.
pub const FACE_WIDTH_TOL: f64 = 1e-2;

/// Equilibria found by support enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct NashEnumeration {
    /// Distinct extreme equilibria with their values.
    pub equilibria: Vec<(StrategyProfile, f64)>,
    /// Largest coordinate range over the optimal strategy sets, measured by
    /// LP. Zero (up to solver noise) iff both optimal sets are points.
    pub face_width: f64,
}

impl NashEnumeration {
    /// Exactly one extreme equilibrium and optimal sets that are points.
    pub fn is_unique(&self) -> bool {
        self.equilibria.len() == 1 && self.face_width <= FACE_WIDTH_TOL
    }

    /// `true` iff the game's only equilibrium is `profile`.
    pub fn is_exactly(&self, profile: &StrategyProfile) -> bool {
        self.is_unique() && self.equilibria[0].0.distance(profile) <= 1e-6
    }
}

/// Enumerates extreme equilibria through square kernels: for each pair of
/// equal-size index sets with an invertible bordered block, solves the
/// indifference systems for both players and keeps nonnegative solutions
/// that survive every pure deviation. Every extreme equilibrium arises from
/// some such kernel, so the list is complete. Independently, LPs measure the
/// width of both players' optimal strategy sets.
pub fn enumerate_nash(game: &MatrixGame, max_dim: usize) -> Result<NashEnumeration> {
    let (m, n) = game.dims();
    if m > max_dim || n > max_dim {
        return Err(Error::DimensionTooLarge {
            rows: m,
            cols: n,
            max_dim,
        });
    }
    let r = game.payoff();
    let scale = r.amax().max(1.0);
    let tol = 1e-9 * scale;
    let mut found: Vec<(StrategyProfile, f64)> = Vec::new();
    for k in 1..=m.min(n) {
        for rows in (0..m).combinations(k) {
            for cols in (0..n).combinations(k) {
                let Some((q_block, v_q)) = kernel_solution(r, &rows, &cols) else {
                    continue;
                };
                let rt = r.transpose();
                let Some((p_block, v_p)) = kernel_solution(&rt, &cols, &rows) else {
                    continue;
                };
                if (v_p - v_q).abs() > 1e-7 * scale {
                    continue;
                }
                if q_block.iter().chain(&p_block).any(|&x| x < -tol) {
                    continue;
                }
                let mut p = vec![0.0; m];
                let mut q = vec![0.0; n];
                for (a, &i) in rows.iter().enumerate() {
                    p[i] = p_block[a].max(0.0);
                }
                for (a, &j) in cols.iter().enumerate() {
                    q[j] = q_block[a].max(0.0);
                }
                let (p, q) = (renormalize(p), renormalize(q));
                let v = 0.5 * (v_p + v_q);
                let pv = DVector::from_column_slice(&p);
                let qv = DVector::from_column_slice(&q);
                let best_row = (r * &qv).max();
                let worst_col = r.tr_mul(&pv).min();
                if best_row > v + 1e-7 * scale || worst_col < v - 1e-7 * scale {
                    continue;
                }
                let Ok(profile) = StrategyProfile::new(&p, &q) else {
                    continue;
                };
                if found
                    .iter()
                    .all(|(other, _)| other.distance(&profile) > EQUILIBRIUM_TOL)
                {
                    found.push((profile, v));
                }
            }
        }
    }
    let face_width = optimal_face_width(r)?;
    Ok(NashEnumeration {
        equilibria: found,
        face_width,
    })
}

fn renormalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Solves `[[R_IJ, -1], [1ᵀ, 0]] (y, v) = (0, 1)`, i.e. the column mix on
/// `J` that equalizes rows `I`. `None` when the block is singular.
fn kernel_solution(r: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Option<(Vec<f64>, f64)> {
    let k = rows.len();
    let b = bordered_matrix(r, rows, cols);
    let svd = b.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-12 * smax.max(1.0) {
        return None;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let x = b.lu().solve(&rhs)?;
    Some((x.rows(0, k).iter().copied().collect(), x[k]))
}

/// Largest range of any coordinate of `p` over the row player's optimal
/// set, or of `q` over the column player's.
fn optimal_face_width(r: &DMatrix<f64>) -> Result<f64> {
    let (value, _) = maximin(r)?;
    let row_width = face_width_one_side(r, value)?;
    let col_width = face_width_one_side(&(-r.transpose()), -value)?;
    Ok(row_width.max(col_width))
}

fn face_width_one_side(r: &DMatrix<f64>, value: f64) -> Result<f64> {
    let (m, n) = r.shape();
    let slack = 1e-9 * r.amax().max(1.0);
    let mut widest: f64 = 0.0;
    'coords: for coord in 0..m {
        let mut extremes = [0.0; 2];
        for (slot, sign) in [1.0, -1.0].into_iter().enumerate() {
            let mut model = LpModel::new();
            let p: Vec<_> = (0..m)
                .map(|i| model.add_var(format!("p{i}"), 0.0, 1.0))
                .collect::<Result<_>>()?;
            for j in 0..n {
                model.add_constraint((0..m).map(|i| (p[i], r[(i, j)])), Relation::Ge, value - slack)?;
            }
            model.add_constraint(p.iter().map(|&x| (x, 1.0)), Relation::Eq, 1.0)?;
            model.add_objective(p[coord], sign)?;
            let sol = match solve_lp(&model) {
                Ok(sol) => sol,
                // The width is a second check on top of the enumeration, so a
                // solver result that fails its feasibility audit is skipped
                // rather than allowed to sink the whole oracle.
                Err(Error::NumericalFailure(msg)) => {
                    warn!("skipping optimal-face LP for coordinate {coord}: {msg}");
                    continue 'coords;
                }
                Err(e) => return Err(e),
            };
            if sol.status != LpStatus::Optimal {
                return Err(Error::SolverFailure(format!("optimal-face LP is {}", sol.status)));
            }
            extremes[slot] = sol.value(p[coord]);
        }
        widest = widest.max(extremes[1] - extremes[0]);
    }
    Ok(widest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(rows: &[Vec<f64>]) -> MatrixGame {
        MatrixGame::from_rows(rows).unwrap()
    }

    fn rps() -> MatrixGame {
        game(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]])
    }

    fn uniform3() -> StrategyProfile {
        StrategyProfile::uniform(3, 3).unwrap()
    }

    #[test]
    fn rps_siisow() {
        let r = check_siisow(&rps(), &uniform3()).unwrap();
        assert!(r.game_value.abs() < 1e-15);
        assert!(r.row_sii_residual < 1e-15 && r.col_sii_residual < 1e-15);
        assert_eq!(r.row_sow_gap, Limit::Unbounded);
        assert_eq!(r.col_sow_gap, Limit::Unbounded);
    }

    #[test]
    fn one_by_one_game() {
        let g = game(&[vec![5.0]]);
        let pr = StrategyProfile::pure(1, 1, 0, 0).unwrap();
        let r = check_siisow(&g, &pr).unwrap();
        assert_eq!(r.game_value, 5.0);
        assert_eq!(r.row_sii_residual, 0.0);
        let c = verify_unique_ne(&g, &pr, Tolerances::default()).unwrap();
        assert!(c.valid);
    }

    #[test]
    fn one_by_one_block_always_invertible() {
        for x in [-3.0, 0.0, 2.5] {
            let b = bordered_matrix(&DMatrix::from_element(1, 1, x), &[0], &[0]);
            assert!((b.determinant() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_block_is_singular() {
        let g = game(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        let (s, eq) = check_inv(&g, &StrategyProfile::uniform(2, 2).unwrap()).unwrap();
        assert!(eq);
        assert!(s < 1e-15);
    }

    #[test]
    fn matching_pennies_pure_profile_is_invalid() {
        let g = game(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let c = verify_unique_ne(&g, &StrategyProfile::pure(2, 2, 0, 0).unwrap(), Tolerances::default())
            .unwrap();
        assert!(!c.valid);
        assert_eq!(c.row_sii_residual, 0.0);
        assert!(c.col_sow_gap.finite().unwrap() <= 0.0);
    }

    #[test]
    fn bottled_water_modified_game_is_valid() {
        let g = game(&[vec![0.0, -0.01], vec![1.0, 0.0]]);
        let pr = StrategyProfile::pure(2, 2, 1, 1).unwrap();
        let c = verify_unique_ne(&g, &pr, Tolerances::default()).unwrap();
        assert!(c.valid, "{:?}", c.failures());
        assert_eq!(c.game_value, 0.0);
    }

    #[test]
    fn unequal_supports_report_zero_sigma() {
        let g = rps();
        let pr = StrategyProfile::new(&[0.5, 0.5, 0.0], &[1.0 / 3.0; 3]).unwrap();
        let (s, eq) = check_inv(&g, &pr).unwrap();
        assert_eq!((s, eq), (0.0, false));
    }

    #[test]
    fn simplified_morra_minimax() {
        let s = solve_zero_sum(&game(&[vec![2.0, -3.0], vec![-3.0, 4.0]])).unwrap();
        assert!((s.value + 1.0 / 12.0).abs() < 1e-9);
        assert!((s.p[0] - 7.0 / 12.0).abs() < 1e-9);
        assert!((s.q[0] - 7.0 / 12.0).abs() < 1e-9);
    }

    #[test]
    fn bottled_water_original_value() {
        let s = solve_zero_sum(&game(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert!((s.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn rps_enumerates_to_uniform() {
        let e = enumerate_nash(&rps(), DEFAULT_MAX_DIM).unwrap();
        assert!(e.is_exactly(&uniform3()));
        assert!(e.equilibria[0].1.abs() < 1e-12);
    }

    #[test]
    fn classic_morra_is_not_unique() {
        let g = game(&[
            vec![0.0, 2.0, -3.0, 0.0],
            vec![-2.0, 0.0, 0.0, 3.0],
            vec![3.0, 0.0, 0.0, -4.0],
            vec![0.0, -3.0, 4.0, 0.0],
        ]);
        let e = enumerate_nash(&g, DEFAULT_MAX_DIM).unwrap();
        assert!(!e.is_unique());
        let has = |x: [f64; 4]| {
            e.equilibria
                .iter()
                .any(|(pr, _)| (0..4).all(|i| (pr.p()[i] - x[i]).abs() < 1e-9))
        };
        assert!(has([0.0, 4.0 / 7.0, 3.0 / 7.0, 0.0]));
        assert!(has([0.0, 3.0 / 5.0, 2.0 / 5.0, 0.0]));
    }

    #[test]
    fn single_entry_game_enumerates_once() {
        let e = enumerate_nash(&game(&[vec![1.0]]), DEFAULT_MAX_DIM).unwrap();
        assert_eq!(e.equilibria.len(), 1);
        assert_eq!(e.equilibria[0].1, 1.0);
        assert!(e.is_unique());
    }

    #[test]
    fn enumeration_rejects_large_games() {
        let g = MatrixGame::new(DMatrix::zeros(7, 2), Limit::Unbounded).unwrap();
        assert!(matches!(
            enumerate_nash(&g, 6),
            Err(Error::DimensionTooLarge { rows: 7, .. })
        ));
    }
}
