//! Finite-horizon Markov game modification.
//!
//! Stage games are `Q_h(s) = R_h(s) + Σ_{s'} P_h(s'|s) v_{h+1}(s')`, with
//! `Q_{H}(s) = R_{H}(s)` in the last period. A Markov policy is the unique
//! Markov perfect equilibrium exactly when every stage target is the unique
//! equilibrium of its stage game.

use log::debug;
use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::erps::build_erps;
use crate::error::{Error, Result};
use crate::feasibility::{check_feasibility_markov, FeasibilityReport};
use crate::lp::{solve_lp, AbsCostHandle, LpModel, LpStatus, VarId};
use crate::normal::{
    add_stage_constraints, add_value_range, draw_epsilon, entry_bounds, tie_break,
    tie_break_weights, Continuation, MAX_REDRAWS,
};
use crate::types::{
    weighted_l1, Limit, MarkovGame, MarkovPolicy, ModificationRequest, SolverStats,
};
use crate::uniqueness::{solve_zero_sum, verify_unique_ne, Tolerances, UniquenessCertificate};

/// Stage games and values from backward induction. Indexed `[h][s]` with
/// 0-based periods.
#[derive(Debug, Clone, PartialEq)]
pub struct StageDecomposition {
    pub q: Vec<Vec<DMatrix<f64>>>,
    pub values: Vec<Vec<f64>>,
    /// `Σ_s P_0(s) v_0(s)`.
    pub v0: f64,
}

fn initial_value(game: &MarkovGame, first: &[f64]) -> f64 {
    game.initial().iter().zip(first).map(|(p, v)| p * v).sum()
}

/// Solves every stage game from the last period backwards.
pub fn backward_induction(game: &MarkovGame) -> Result<StageDecomposition> {
    let horizon = game.horizon();
    let states = game.num_states();
    let mut q = vec![Vec::new(); horizon];
    let mut values = vec![Vec::new(); horizon];
    let mut next = vec![0.0; states];
    for h in (0..horizon).rev() {
        let stage: Vec<(DMatrix<f64>, f64)> = (0..states)
            .into_par_iter()
            .map(|s| {
                let qm = game.reward(h, s) + game.continuation(h, s, &next);
                let g = crate::types::MatrixGame::new(qm.clone(), Limit::Unbounded)?;
                Ok((qm, solve_zero_sum(&g)?.value))
            })
            .collect::<Result<_>>()?;
        let (qs, vs): (Vec<_>, Vec<_>) = stage.into_iter().unzip();
        next.clone_from(&vs);
        q[h] = qs;
        values[h] = vs;
    }
    let v0 = initial_value(game, &values[0]);
    Ok(StageDecomposition { q, values, v0 })
}

/// Per-stage certificates computed on freshly solved stage games.
#[derive(Debug, Clone, PartialEq)]
pub struct MpeVerification {
    pub decomposition: StageDecomposition,
    pub certificates: Vec<Vec<UniquenessCertificate>>,
    pub valid: bool,
}

impl MpeVerification {
    pub fn v0(&self) -> f64 {
        self.decomposition.v0
    }

    /// `(h, s)` of every stage whose certificate failed.
    pub fn failing_stages(&self) -> Vec<(usize, usize)> {
        self.certificates
            .iter()
            .enumerate()
            .flat_map(|(h, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.valid)
                    .map(move |(s, _)| (h, s))
            })
            .collect()
    }
}

pub fn verify_mpe_unique(
    game: &MarkovGame,
    policy: &MarkovPolicy,
    tol: Tolerances,
) -> Result<MpeVerification> {
    policy.check_game(game)?;
    let decomposition = backward_induction(game)?;
    let certificates: Vec<Vec<UniquenessCertificate>> = decomposition
        .q
        .iter()
        .enumerate()
        .map(|(h, stage)| {
            stage
                .par_iter()
                .enumerate()
                .map(|(s, qm)| {
                    let g = crate::types::MatrixGame::new(qm.clone(), Limit::Unbounded)?;
                    verify_unique_ne(&g, policy.stage(h, s), tol)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let valid = certificates.iter().flatten().all(|c| c.valid);
    Ok(MpeVerification {
        decomposition,
        certificates,
        valid,
    })
}

/// Relaxed joint program for a Markov request.
///
/// Variable layout: all stage values `v_h(s)` in `(h, s)` order, then the
/// reward entries of each stage in `(h, s)` order, row-major.
#[derive(Debug, Clone)]
pub struct MarkovRelaxedProgram {
    pub model: LpModel,
    /// `[h][s]`.
    pub values: Vec<Vec<VarId>>,
    /// `[h][s]`, row-major.
    pub entries: Vec<Vec<Vec<VarId>>>,
    pub cost: AbsCostHandle,
    dims: (usize, usize),
}

impl MarkovRelaxedProgram {
    fn rewards_from(&self, values: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
        let (m, n) = self.dims;
        self.entries
            .iter()
            .map(|stage| {
                stage
                    .iter()
                    .map(|e| DMatrix::from_fn(m, n, |i, j| values[e[i * n + j].index()]))
                    .collect()
            })
            .collect()
    }
}

fn ensure_feasible(report: FeasibilityReport) -> Result<FeasibilityReport> {
    if report.is_ok() {
        Ok(report)
    } else {
        Err(Error::InfeasibleRequest(report))
    }
}

fn check_request(original: &MarkovGame, request: &ModificationRequest<MarkovPolicy>) -> Result<()> {
    request.validate()?;
    request.target.check_game(original)?;
    let (m, n) = original.action_dims();
    request
        .cost
        .validate_override(original.horizon() * original.num_states() * m * n)
}

fn stage_offset(game: &MarkovGame, h: usize, s: usize) -> usize {
    let (m, n) = game.action_dims();
    (h * game.num_states() + s) * m * n
}

pub fn build_relaxed_program_markov(
    original: &MarkovGame,
    request: &ModificationRequest<MarkovPolicy>,
) -> Result<MarkovRelaxedProgram> {
    check_request(original, request)?;
    ensure_feasible(check_feasibility_markov(request))?;
    build_unchecked(original, request)
}

fn build_unchecked(
    original: &MarkovGame,
    request: &ModificationRequest<MarkovPolicy>,
) -> Result<MarkovRelaxedProgram> {
    let horizon = original.horizon();
    let states = original.num_states();
    let (m, n) = original.action_dims();
    let mut model = LpModel::new();
    let values: Vec<Vec<VarId>> = (0..horizon)
        .map(|h| (0..states).map(|s| model.free_var(format!("v_{h}_{s}"))).collect())
        .collect();
    let (lo, hi) = entry_bounds(request.bound, request.margin_reward);
    let mut entries = Vec::with_capacity(horizon);
    for h in 0..horizon {
        let mut stage = Vec::with_capacity(states);
        for s in 0..states {
            let mut e = Vec::with_capacity(m * n);
            for i in 0..m {
                for j in 0..n {
                    e.push(model.add_var(format!("R_{h}_{s}_{i}_{j}"), lo, hi)?);
                }
            }
            stage.push(e);
        }
        entries.push(stage);
    }
    for h in 0..horizon {
        for s in 0..states {
            let terms = |i: usize, j: usize| -> Vec<(VarId, f64)> {
                if h + 1 == horizon {
                    return Vec::new();
                }
                original
                    .transition(h, s, i, j)
                    .iter()
                    .zip(&values[h + 1])
                    .filter(|(p, _)| **p != 0.0)
                    .map(|(&p, &v)| (v, p))
                    .collect()
            };
            let cont = Continuation {
                constant: &|_, _| 0.0,
                terms: &terms,
            };
            add_stage_constraints(
                &mut model,
                request.target.stage(h, s),
                &entries[h][s],
                values[h][s],
                &cont,
                request.margin_sow,
            )?;
        }
    }
    let start: Vec<(VarId, f64)> = values[0]
        .iter()
        .zip(original.initial())
        .filter(|(_, p)| **p != 0.0)
        .map(|(&v, &p)| (v, p))
        .collect();
    add_value_range(&mut model, start, &request.value_range)?;
    let mut pairs = Vec::with_capacity(horizon * states * m * n);
    for h in 0..horizon {
        for s in 0..states {
            let w = request
                .cost
                .table_weights(request.target.stage(h, s), stage_offset(original, h, s));
            let r0 = original.reward(h, s);
            pairs.extend((0..m * n).map(|k| (entries[h][s][k], r0[(k / n, k % n)], w[k])));
        }
    }
    let cost = model.encode_abs_cost(pairs)?;
    Ok(MarkovRelaxedProgram {
        model,
        values,
        entries,
        cost,
        dims: (m, n),
    })
}

#[derive(Debug, Clone)]
pub struct MarkovModificationResult {
    pub modified: MarkovGame,
    /// Rewards of the relaxed optimum before perturbation, `[h][s]`.
    pub relaxed: Vec<Vec<DMatrix<f64>>>,
    /// Stage values from the relaxed program, `[h][s]`.
    pub stage_values: Vec<Vec<f64>>,
    pub achieved_value: f64,
    pub relaxed_cost: f64,
    pub cost: f64,
    /// Perturbation scale per stage, `[h][s]`.
    pub epsilons: Vec<Vec<f64>>,
    pub verification: MpeVerification,
    /// Largest gap between recomputed stage values and the program's.
    pub bellman_residual: f64,
    pub feasibility: FeasibilityReport,
    pub stats: SolverStats,
}

fn markov_cost(
    rewards: &[Vec<DMatrix<f64>>],
    original: &MarkovGame,
    request: &ModificationRequest<MarkovPolicy>,
) -> f64 {
    let mut total = 0.0;
    for (h, stage) in rewards.iter().enumerate() {
        for (s, r) in stage.iter().enumerate() {
            let w = request
                .cost
                .table_weights(request.target.stage(h, s), stage_offset(original, h, s));
            total += weighted_l1(r, original.reward(h, s), &w);
        }
    }
    total
}

fn clamp_to_box(rewards: &mut [Vec<DMatrix<f64>>], lo: f64, hi: f64) {
    for r in rewards.iter_mut().flatten() {
        r.apply(|x| *x = x.clamp(lo, hi));
    }
}

/// Relax and perturb for Markov games.
pub fn rap_mg(
    original: &MarkovGame,
    request: &ModificationRequest<MarkovPolicy>,
) -> Result<MarkovModificationResult> {
    rap_mg_with(original, request, Tolerances::default())
}

pub fn rap_mg_with(
    original: &MarkovGame,
    request: &ModificationRequest<MarkovPolicy>,
    tol: Tolerances,
) -> Result<MarkovModificationResult> {
    check_request(original, request)?;
    let feasibility = ensure_feasible(check_feasibility_markov(request))?;
    let program = build_unchecked(original, request)?;
    let primary = solve_lp(&program.model)?;
    if primary.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!(
            "relaxed program is {} although the pre-check passed",
            primary.status
        )));
    }
    let horizon = original.horizon();
    let states = original.num_states();
    let (m, n) = original.action_dims();
    let mut secondary = Vec::with_capacity(horizon * states * m * n);
    for h in 0..horizon {
        for s in 0..states {
            let w = tie_break_weights(
                &request.cost,
                request.target.stage(h, s),
                stage_offset(original, h, s),
            );
            let r0 = original.reward(h, s);
            secondary.extend((0..m * n).map(|k| (program.entries[h][s][k], r0[(k / n, k % n)], w[k])));
        }
    }
    let solution = tie_break(&program.model, program.cost, &primary, secondary);

    let mut relaxed = program.rewards_from(&solution.values);
    let (lo, hi) = entry_bounds(request.bound, request.margin_reward);
    clamp_to_box(&mut relaxed, lo, hi);
    let stage_values: Vec<Vec<f64>> = program
        .values
        .iter()
        .map(|row| row.iter().map(|&v| solution.value(v)).collect())
        .collect();
    let achieved_value = initial_value(original, &stage_values[0]);
    let relaxed_cost = markov_cost(&relaxed, original, request);

    let erps: Vec<Vec<DMatrix<f64>>> = request
        .target
        .stages()
        .iter()
        .map(|stage| stage.iter().map(|pr| Ok(build_erps(pr)?.matrix)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(request.rng_seed);
    let mut epsilons: Vec<Vec<f64>> = (0..horizon)
        .map(|_| {
            (0..states)
                .map(|_| draw_epsilon(&mut rng, request.margin_reward, request.margin_sow))
                .collect()
        })
        .collect();
    let mut attempts = vec![vec![1usize; states]; horizon];
    let mut redraws = 0;
    loop {
        let rewards: Vec<Vec<DMatrix<f64>>> = relaxed
            .iter()
            .zip(&erps)
            .zip(&epsilons)
            .map(|((rs, es), eps)| {
                rs.iter()
                    .zip(es)
                    .zip(eps)
                    .map(|((r, e), &x)| r + e * x)
                    .collect()
            })
            .collect();
        let modified = original.with_rewards(rewards, request.bound)?;
        let verification = verify_mpe_unique(&modified, &request.target, tol)?;
        let failing = verification.failing_stages();
        if failing.is_empty() {
            let bellman_residual = verification
                .decomposition
                .values
                .iter()
                .flatten()
                .zip(stage_values.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let cost = markov_cost(modified.rewards(), original, request);
            return Ok(MarkovModificationResult {
                modified,
                relaxed,
                stage_values,
                achieved_value,
                relaxed_cost,
                cost,
                epsilons,
                verification,
                bellman_residual,
                feasibility,
                stats: SolverStats {
                    lp_variables: program.model.num_vars(),
                    lp_constraints: program.model.num_constraints(),
                    lp_iterations: primary.iterations + solution.iterations,
                    redraws,
                },
            });
        }
        for &(h, s) in &failing {
            let detail = verification.certificates[h][s].failures().join(", ");
            if attempts[h][s] >= MAX_REDRAWS {
                return Err(Error::CertificationFailure {
                    attempts: MAX_REDRAWS,
                    detail: format!("period {h}, state {s}: {detail}"),
                });
            }
            debug!("stage ({h}, {s}) perturbation rejected: {detail}");
            epsilons[h][s] = draw_epsilon(&mut rng, request.margin_reward, request.margin_sow);
            attempts[h][s] += 1;
            redraws += 1;
        }
    }
}

/// Total cost of modifying the stages one at a time, last period first:
/// each stage game is modified optimally with the continuation values fixed
/// by the already-modified later periods. Requires a free value range.
pub fn stagewise_optimum(
    original: &MarkovGame,
    request: &ModificationRequest<MarkovPolicy>,
) -> Result<f64> {
    check_request(original, request)?;
    if !request.value_range.is_free() {
        return Err(Error::InvalidRequest(
            "stagewise decomposition needs a free value range".into(),
        ));
    }
    ensure_feasible(check_feasibility_markov(request))?;
    let horizon = original.horizon();
    let states = original.num_states();
    let (m, n) = original.action_dims();
    let (lo, hi) = entry_bounds(request.bound, request.margin_reward);
    let mut next = vec![0.0; states];
    let mut total = 0.0;
    for h in (0..horizon).rev() {
        let stage: Vec<(f64, f64)> = (0..states)
            .into_par_iter()
            .map(|s| {
                let profile = request.target.stage(h, s);
                let cont = original.continuation(h, s, &next);
                let mut model = LpModel::new();
                let v = model.free_var("v");
                let mut e = Vec::with_capacity(m * n);
                for i in 0..m {
                    for j in 0..n {
                        e.push(model.add_var(format!("R_{i}_{j}"), lo, hi)?);
                    }
                }
                let constant = |i: usize, j: usize| cont[(i, j)];
                let c = Continuation {
                    constant: &constant,
                    terms: &|_, _| Vec::new(),
                };
                add_stage_constraints(&mut model, profile, &e, v, &c, request.margin_sow)?;
                let r0 = original.reward(h, s);
                let offset = stage_offset(original, h, s);
                let w = request.cost.table_weights(profile, offset);
                let handle =
                    model.encode_abs_cost((0..m * n).map(|k| (e[k], r0[(k / n, k % n)], w[k])))?;
                let primary = solve_lp(&model)?;
                if primary.status != LpStatus::Optimal {
                    return Err(Error::SolverFailure(format!(
                        "stage ({h}, {s}) program is {}",
                        primary.status
                    )));
                }
                let tw = tie_break_weights(&request.cost, profile, offset);
                let chosen = tie_break(
                    &model,
                    handle,
                    &primary,
                    (0..m * n).map(|k| (e[k], r0[(k / n, k % n)], tw[k])),
                );
                Ok((primary.abs_cost(&model, handle), chosen.value(v)))
            })
            .collect::<Result<_>>()?;
        total += stage.iter().map(|x| x.0).sum::<f64>();
        next = stage.into_iter().map(|x| x.1).collect();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{MatrixGame, StrategyProfile, ValueRange};

    fn rps() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0])
    }

    fn single_stage(r: DMatrix<f64>) -> MarkovGame {
        MarkovGame::new(vec![vec![r]], vec![], vec![1.0], Limit::Unbounded).unwrap()
    }

    #[test]
    fn horizon_one_reduces_to_the_matrix_game() {
        let g = single_stage(rps());
        let d = backward_induction(&g).unwrap();
        assert_eq!(d.q[0][0], rps());
        assert!(d.v0.abs() < 1e-9);
        let policy = MarkovPolicy::new(vec![vec![StrategyProfile::uniform(3, 3).unwrap()]]).unwrap();
        assert!(verify_mpe_unique(&g, &policy, Tolerances::default()).unwrap().valid);
    }

    #[test]
    fn zero_rewards_have_zero_values() {
        let z = DMatrix::zeros(2, 2);
        let t = vec![vec![vec![vec![vec![0.5, 0.5]; 2]; 2]; 2]];
        let g = MarkovGame::new(vec![vec![z.clone(), z.clone()], vec![z.clone(), z]], t, vec![0.5, 0.5], Limit::Unbounded)
            .unwrap();
        let d = backward_induction(&g).unwrap();
        assert!(d.values.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn unequal_stage_support_fails_verification() {
        let g = single_stage(rps());
        let pr = StrategyProfile::new(&[0.5, 0.5, 0.0], &[1.0 / 3.0; 3]).unwrap();
        let policy = MarkovPolicy::new(vec![vec![pr]]).unwrap();
        let v = verify_mpe_unique(&g, &policy, Tolerances::default()).unwrap();
        assert!(!v.valid);
        assert_eq!(v.failing_stages(), vec![(0, 0)]);
    }

    #[test]
    fn single_stage_program_matches_normal_form() {
        let r = DMatrix::from_row_slice(2, 2, &[2.0, -3.0, -3.0, 4.0]);
        let p = [7.0 / 12.0, 5.0 / 12.0];
        let pr = StrategyProfile::new(&p, &p).unwrap();
        let normal_req = ModificationRequest::new(pr.clone())
            .value_range(ValueRange::exactly(0.0))
            .bound(Limit::Finite(10.0));
        let markov_req = ModificationRequest::new(MarkovPolicy::new(vec![vec![pr]]).unwrap())
            .value_range(ValueRange::exactly(0.0))
            .bound(Limit::Finite(10.0));
        let a = crate::normal::build_relaxed_program(
            &MatrixGame::new(r.clone(), Limit::Unbounded).unwrap(),
            &normal_req,
        )
        .unwrap();
        let b = build_relaxed_program_markov(&single_stage(r), &markov_req).unwrap();
        // Same program up to variable names.
        assert_eq!(a.model.constraints(), b.model.constraints());
        assert_eq!(a.model.abs_terms(), b.model.abs_terms());
        let bounds = |m: &LpModel| m.vars().iter().map(|v| (v.lower, v.upper)).collect::<Vec<_>>();
        assert_eq!(bounds(&a.model), bounds(&b.model));
    }

    #[test]
    fn pre_check_rejects_value_at_horizon_bound() {
        let z = DMatrix::zeros(1, 1);
        let t: Vec<_> = (0..3).map(|_| vec![vec![vec![vec![1.0]]]]).collect();
        let g = MarkovGame::new(vec![vec![z]; 4], t, vec![1.0], Limit::Finite(1.0)).unwrap();
        let policy = MarkovPolicy::new(vec![vec![StrategyProfile::pure(1, 1, 0, 0).unwrap()]; 4]).unwrap();
        let req = ModificationRequest::new(policy)
            .bound(Limit::Finite(1.0))
            .value_range(ValueRange::new(Limit::Finite(4.0), Limit::Finite(5.0)).unwrap());
        assert!(matches!(rap_mg(&g, &req), Err(Error::InfeasibleRequest(_))));
    }
}
