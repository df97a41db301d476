//! Normal-form game modification: the relaxed program with margins and the
//! relax-and-perturb loop.

use log::debug;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::erps::build_erps;
use crate::error::{Error, Result};
use crate::feasibility::{check_feasibility_normal, FeasibilityReport};
use crate::lp::{solve_lp, AbsCostHandle, LpModel, LpSolution, LpStatus, Relation, VarId};
use crate::types::{
    weighted_l1, CostSpec, Limit, MatrixGame, ModificationRequest, SolverStats, StrategyProfile,
};
use crate::uniqueness::{verify_unique_ne, Tolerances, UniquenessCertificate};

/// Certification attempts per perturbation before giving up.
pub const MAX_REDRAWS: usize = 16;

/// Relaxed linear program for one normal-form request.
///
/// Variable layout: `v` first, then the payoff entries row-major.
#[derive(Debug, Clone)]
pub struct RelaxedProgram {
    pub model: LpModel,
    pub value: VarId,
    /// Row-major payoff variables.
    pub entries: Vec<VarId>,
    pub cost: AbsCostHandle,
    pub(crate) dims: (usize, usize),
}

impl RelaxedProgram {
    pub(crate) fn matrix_from(&self, values: &[f64]) -> DMatrix<f64> {
        let (m, n) = self.dims;
        DMatrix::from_fn(m, n, |i, j| values[self.entries[i * n + j].index()])
    }
}

/// A term of a stage payoff `Q_ij = R_ij + cont_ij`: linear in model
/// variables plus a constant.
pub(crate) struct Continuation<'a> {
    pub constant: &'a dyn Fn(usize, usize) -> f64,
    pub terms: &'a dyn Fn(usize, usize) -> Vec<(VarId, f64)>,
}

/// Adds the row/column indifference equalities and switch-out margins for
/// one stage game `Q = R + cont` with value variable `v`.
pub(crate) fn add_stage_constraints(
    model: &mut LpModel,
    profile: &StrategyProfile,
    entries: &[VarId],
    value: VarId,
    cont: &Continuation<'_>,
    margin_sow: f64,
) -> Result<()> {
    let (m, n) = profile.dims();
    let p = profile.p();
    let q = profile.q();
    let row_terms = |i: usize| -> (Vec<(VarId, f64)>, f64) {
        let mut terms = vec![(value, -1.0)];
        let mut constant = 0.0;
        for &j in profile.col_support() {
            terms.push((entries[i * n + j], q[j]));
            terms.extend((cont.terms)(i, j).into_iter().map(|(x, a)| (x, a * q[j])));
            constant += q[j] * (cont.constant)(i, j);
        }
        (terms, constant)
    };
    let col_terms = |j: usize| -> (Vec<(VarId, f64)>, f64) {
        let mut terms = vec![(value, -1.0)];
        let mut constant = 0.0;
        for &i in profile.row_support() {
            terms.push((entries[i * n + j], p[i]));
            terms.extend((cont.terms)(i, j).into_iter().map(|(x, a)| (x, a * p[i])));
            constant += p[i] * (cont.constant)(i, j);
        }
        (terms, constant)
    };
    for &i in profile.row_support() {
        let (t, c) = row_terms(i);
        model.add_constraint(t, Relation::Eq, 0.0 - c)?;
    }
    for &j in profile.col_support() {
        let (t, c) = col_terms(j);
        model.add_constraint(t, Relation::Eq, 0.0 - c)?;
    }
    for i in (0..m).filter(|i| !profile.row_support().contains(i)) {
        let (t, c) = row_terms(i);
        model.add_constraint(t, Relation::Le, -margin_sow - c)?;
    }
    for j in (0..n).filter(|j| !profile.col_support().contains(j)) {
        let (t, c) = col_terms(j);
        model.add_constraint(t, Relation::Ge, margin_sow - c)?;
    }
    Ok(())
}

pub(crate) fn entry_bounds(bound: Limit, margin_reward: f64) -> (f64, f64) {
    match bound {
        Limit::Finite(b) => (-b + margin_reward, b - margin_reward),
        Limit::Unbounded => (f64::NEG_INFINITY, f64::INFINITY),
    }
}

pub(crate) fn add_value_range(
    model: &mut LpModel,
    terms: Vec<(VarId, f64)>,
    range: &crate::types::ValueRange,
) -> Result<()> {
    if let Limit::Finite(lo) = range.lo {
        model.add_constraint(terms.clone(), Relation::Ge, lo)?;
    }
    if let Limit::Finite(hi) = range.hi {
        model.add_constraint(terms, Relation::Le, hi)?;
    }
    Ok(())
}

fn ensure_feasible(report: FeasibilityReport) -> Result<FeasibilityReport> {
    if report.is_ok() {
        Ok(report)
    } else {
        Err(Error::InfeasibleRequest(report))
    }
}

pub fn build_relaxed_program(
    original: &MatrixGame,
    request: &ModificationRequest<StrategyProfile>,
) -> Result<RelaxedProgram> {
    request.validate()?;
    original.check_profile(&request.target)?;
    ensure_feasible(check_feasibility_normal(request))?;
    build_unchecked(original, request)
}

fn build_unchecked(
    original: &MatrixGame,
    request: &ModificationRequest<StrategyProfile>,
) -> Result<RelaxedProgram> {
    let (m, n) = original.dims();
    request.cost.validate_override(m * n)?;
    let mut model = LpModel::new();
    let value = model.free_var("v");
    let (lo, hi) = entry_bounds(request.bound, request.margin_reward);
    let mut entries = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            entries.push(model.add_var(format!("R_{i}_{j}"), lo, hi)?);
        }
    }
    let none = Continuation {
        constant: &|_, _| 0.0,
        terms: &|_, _| Vec::new(),
    };
    add_stage_constraints(&mut model, &request.target, &entries, value, &none, request.margin_sow)?;
    add_value_range(&mut model, vec![(value, 1.0)], &request.value_range)?;
    let weights = request.cost.table_weights(&request.target, 0);
    let r0 = original.payoff();
    let cost = model.encode_abs_cost(
        (0..m * n).map(|k| (entries[k], r0[(k / n, k % n)], weights[k])),
    )?;
    Ok(RelaxedProgram {
        model,
        value,
        entries,
        cost,
        dims: (m, n),
    })
}

/// Weights of the cost used to break ties between optimal relaxed solutions:
/// target-weighted deviations for the one-time cost, plain deviations for
/// the forever cost.
pub(crate) fn tie_break_weights(cost: &CostSpec, profile: &StrategyProfile, offset: usize) -> Vec<f64> {
    match cost {
        CostSpec::OneTimeL1 => CostSpec::forever().table_weights(profile, offset),
        CostSpec::Forever { .. } => CostSpec::OneTimeL1.table_weights(profile, offset),
    }
}

/// Re-solves with the primary cost capped at its optimum and `secondary`
/// as the objective, picking a canonical point of the optimal face. Falls
/// back to `primary` if the second solve fails.
pub(crate) fn tie_break(
    model: &LpModel,
    cost: AbsCostHandle,
    primary: &LpSolution,
    secondary: impl IntoIterator<Item = (VarId, f64, f64)>,
) -> LpSolution {
    let optimum = primary.abs_cost(model, cost);
    let mut second = model.clone();
    let attempt = second
        .objective_to_budget(cost, optimum + TIE_BREAK_SLACK * optimum.max(1.0))
        .and_then(|_| second.encode_abs_cost(secondary))
        .and_then(|_| solve_lp(&second));
    match attempt {
        Ok(s) if s.is_optimal() => s,
        Ok(s) => {
            debug!("tie-break LP is {}; keeping the first optimum", s.status);
            primary.clone()
        }
        Err(e) => {
            debug!("tie-break LP failed ({e}); keeping the first optimum");
            primary.clone()
        }
    }
}

/// Relative slack on the primary cost when breaking ties.
const TIE_BREAK_SLACK: f64 = 1e-9;

/// Output of [`rap`].
#[derive(Debug, Clone)]
pub struct ModificationResult {
    pub modified: MatrixGame,
    /// Optimum of the relaxed program before perturbation.
    pub relaxed: DMatrix<f64>,
    pub achieved_value: f64,
    /// Cost of the relaxed optimum.
    pub relaxed_cost: f64,
    /// Cost of the returned game.
    pub cost: f64,
    /// Perturbation scale applied to the extended rock-paper-scissors game.
    pub epsilon: f64,
    pub certificate: UniquenessCertificate,
    pub feasibility: FeasibilityReport,
    pub stats: SolverStats,
}

/// Draws a perturbation scale in `[-λ, λ]`, skipping zero and draws that
/// would eat more than half of the switch-out margin.
pub(crate) fn draw_epsilon(rng: &mut ChaCha8Rng, margin_reward: f64, margin_sow: f64) -> f64 {
    loop {
        let eps = rng.random_range(-margin_reward..=margin_reward);
        if eps != 0.0 && eps > -0.5 * margin_sow {
            return eps;
        }
    }
}

/// Relax and perturb: solve the relaxed program, add a random multiple of
/// the extended rock-paper-scissors game, and certify the result.
pub fn rap(
    original: &MatrixGame,
    request: &ModificationRequest<StrategyProfile>,
) -> Result<ModificationResult> {
    rap_with(original, request, Tolerances::default())
}

pub fn rap_with(
    original: &MatrixGame,
    request: &ModificationRequest<StrategyProfile>,
    tol: Tolerances,
) -> Result<ModificationResult> {
    request.validate()?;
    original.check_profile(&request.target)?;
    let feasibility = ensure_feasible(check_feasibility_normal(request))?;
    let program = build_unchecked(original, request)?;
    let primary = solve_lp(&program.model)?;
    match primary.status {
        LpStatus::Optimal => {}
        status => {
            return Err(Error::SolverFailure(format!(
                "relaxed program is {status} although the pre-check passed"
            )))
        }
    }
    let r0 = original.payoff();
    let n = original.cols();
    let secondary = tie_break_weights(&request.cost, &request.target, 0);
    let solution = tie_break(
        &program.model,
        program.cost,
        &primary,
        program.entries.iter().enumerate().map(|(k, &x)| (x, r0[(k / n, k % n)], secondary[k])),
    );
    let mut relaxed = program.matrix_from(&solution.values);
    // Solver noise can leave entries a hair outside the box, which the
    // perturbation would then push past the bound.
    let (lo, hi) = entry_bounds(request.bound, request.margin_reward);
    relaxed.apply(|x| *x = x.clamp(lo, hi));
    let achieved_value = solution.value(program.value);
    let weights = request.cost.table_weights(&request.target, 0);
    let relaxed_cost = weighted_l1(&relaxed, original.payoff(), &weights);

    let erps = build_erps(&request.target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(request.rng_seed);
    let mut last_failure = String::new();
    for attempt in 0..MAX_REDRAWS {
        let epsilon = draw_epsilon(&mut rng, request.margin_reward, request.margin_sow);
        let candidate = &relaxed + &erps.matrix * epsilon;
        let modified = match MatrixGame::new(candidate, request.bound) {
            Ok(g) => g,
            Err(e) => {
                last_failure = e.to_string();
                continue;
            }
        };
        let certificate = verify_unique_ne(&modified, &request.target, tol)?;
        if certificate.valid {
            let cost = weighted_l1(modified.payoff(), original.payoff(), &weights);
            return Ok(ModificationResult {
                modified,
                relaxed,
                achieved_value,
                relaxed_cost,
                cost,
                epsilon,
                certificate,
                feasibility,
                stats: SolverStats {
                    lp_variables: program.model.num_vars(),
                    lp_constraints: program.model.num_constraints(),
                    lp_iterations: primary.iterations + solution.iterations,
                    redraws: attempt,
                },
            });
        }
        last_failure = certificate.failures().join(", ");
        debug!("perturbation {attempt} rejected: {last_failure}");
    }
    Err(Error::CertificationFailure {
        attempts: MAX_REDRAWS,
        detail: last_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ValueRange;

    fn morra() -> MatrixGame {
        MatrixGame::from_rows(&[vec![2.0, -3.0], vec![-3.0, 4.0]]).unwrap()
    }

    #[test]
    fn unequal_supports_rejected_before_solving() {
        let req = ModificationRequest::new(StrategyProfile::new(&[1.0, 0.0], &[0.5, 0.5]).unwrap());
        assert!(matches!(
            rap(&morra(), &req),
            Err(Error::InfeasibleRequest(_))
        ));
    }

    #[test]
    fn already_unique_target_costs_only_the_perturbation() {
        let p = [7.0 / 12.0, 5.0 / 12.0];
        let req = ModificationRequest::new(StrategyProfile::new(&p, &p).unwrap()).margins(1e-3, 1e-3);
        let out = rap(&morra(), &req).unwrap();
        assert!(out.relaxed_cost < 1e-9);
        assert!(out.cost <= 4.0 * 1e-3 + 1e-9);
        assert!(out.certificate.valid);
    }

    #[test]
    fn pure_target_with_forever_cost_keeps_its_cell() {
        let g = MatrixGame::from_rows(&[vec![0.3, -0.2], vec![0.9, 0.1]]).unwrap();
        let req = ModificationRequest::new(StrategyProfile::pure(2, 2, 0, 1).unwrap())
            .cost(CostSpec::forever());
        let prog = build_relaxed_program(&g, &req).unwrap();
        let sol = solve_lp(&prog.model).unwrap();
        assert!(sol.objective.abs() < 1e-12);
        assert!((sol.value(prog.entries[1]) - (-0.2)).abs() < 1e-12);
    }

    #[test]
    fn seed_determines_output() {
        let t = 1.0 / 3.0;
        let req = ModificationRequest::new(StrategyProfile::new(&[t, t, t], &[0.2, 0.3, 0.5]).unwrap())
            .value_range(ValueRange::exactly(0.1))
            .seed(9);
        let g = MatrixGame::from_rows(&[vec![0.1, 0.5, -0.3], vec![0.0, 0.2, 0.9], vec![-0.4, 0.6, 0.3]])
            .unwrap();
        let a = rap(&g, &req).unwrap();
        let b = rap(&g, &req).unwrap();
        assert_eq!(a.modified, b.modified);
        assert!((a.achieved_value - 0.1).abs() < 1e-9);
        let c = rap(&g, &req.clone().seed(10)).unwrap();
        assert_ne!(a.epsilon, c.epsilon);
    }

    #[test]
    fn bounded_output_stays_in_box() {
        let g = MatrixGame::from_rows(&[vec![3.0, -2.0], vec![-5.0, 1.0]]).unwrap();
        let req = ModificationRequest::new(StrategyProfile::uniform(2, 2).unwrap()).bound(Limit::Finite(1.0));
        let out = rap(&g, &req).unwrap();
        assert!(out.modified.payoff().amax() <= 1.0);
        assert!(out.certificate.valid);
    }
}
