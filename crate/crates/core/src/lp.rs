//! A small linear-programming model with weighted absolute-value costs,
//! solved by the `microlp` simplex implementation.
//!
//! Models always minimize. Absolute-value terms `w |x - c|` are kept
//! symbolic until solve time, where they are lowered either by splitting the
//! variable (`x = c + u - w`, no extra rows) or by the classic epigraph
//! encoding (`t >= ±(x - c)`). Both lowerings are exact.

use std::fmt;
use std::io::{self, Write};

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, SolveOutcome};

use crate::error::{Error, Result};

/// Constraint and bound violation allowed in returned solutions, relative to
/// `max(1, |rhs|, largest term)`.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsTerm {
    pub var: VarId,
    pub target: f64,
    pub weight: f64,
    pub role: AbsRole,
}

/// Where an absolute-value term contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsRole {
    Objective,
    /// Left-hand side of budget row `k`: `Σ w |x - c| <= budget_k`.
    Budget(usize),
}

/// Handle to a block of absolute-value cost terms, used to evaluate that
/// block on a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbsCostHandle {
    start: usize,
    end: usize,
}

/// How absolute-value terms are turned into linear constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AbsEncoding {
    /// Split `x = c + u - w` when every absolute-value term on `x` shares
    /// one target, epigraph otherwise.
    #[default]
    Auto,
    /// Always add `t >= x - c`, `t >= c - x`.
    Epigraph,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpModel {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
    abs_terms: Vec<AbsTerm>,
    budgets: Vec<f64>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::InvalidRequest(format!(
                "variable bounds [{lower}, {upper}] are empty"
            )));
        }
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        Ok(VarId(self.vars.len() - 1))
    }

    pub fn free_var(&mut self, name: impl Into<String>) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        });
        VarId(self.vars.len() - 1)
    }

    /// Adds `Σ a_k x_k (rel) rhs`. Repeated variables are merged and terms
    /// are stored in variable order.
    pub fn add_constraint(
        &mut self,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<()> {
        let mut terms: Vec<(VarId, f64)> = terms.into_iter().collect();
        self.check_vars(terms.iter().map(|t| t.0))?;
        terms.sort_by_key(|t| t.0);
        terms.dedup_by(|later, kept| {
            if later.0 == kept.0 {
                kept.1 += later.1;
                true
            } else {
                false
            }
        });
        if !rhs.is_finite() || terms.iter().any(|t| !t.1.is_finite()) {
            return Err(Error::InvalidRequest("constraint has a non-finite coefficient".into()));
        }
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
        Ok(())
    }

    /// Adds `coef · x` to the (minimized) objective.
    pub fn add_objective(&mut self, var: VarId, coef: f64) -> Result<()> {
        self.check_vars([var])?;
        self.objective.push((var, coef));
        Ok(())
    }

    /// Adds `Σ w_k |x_k - c_k|` to the objective.
    pub fn encode_abs_cost(
        &mut self,
        pairs: impl IntoIterator<Item = (VarId, f64, f64)>,
    ) -> Result<AbsCostHandle> {
        self.push_abs_terms(pairs, AbsRole::Objective)
    }

    /// Adds the constraint `Σ w_k |x_k - c_k| <= budget`.
    pub fn encode_abs_budget(
        &mut self,
        pairs: impl IntoIterator<Item = (VarId, f64, f64)>,
        budget: f64,
    ) -> Result<AbsCostHandle> {
        if !budget.is_finite() {
            return Err(Error::InvalidCost(format!("budget {budget} is not finite")));
        }
        let handle = self.push_abs_terms(pairs, AbsRole::Budget(self.budgets.len()))?;
        self.budgets.push(budget);
        Ok(handle)
    }

    /// Turns the objective terms of `handle` into a budget row and returns
    /// the handle of the budget. Other objective terms are dropped, so the
    /// caller can install a new objective.
    pub fn objective_to_budget(&mut self, handle: AbsCostHandle, budget: f64) -> Result<AbsCostHandle> {
        let pairs: Vec<(VarId, f64, f64)> = self.abs_terms[handle.start..handle.end]
            .iter()
            .map(|t| (t.var, t.target, t.weight))
            .collect();
        self.objective.clear();
        self.abs_terms.retain(|t| t.role != AbsRole::Objective);
        self.encode_abs_budget(pairs, budget)
    }

    fn push_abs_terms(
        &mut self,
        pairs: impl IntoIterator<Item = (VarId, f64, f64)>,
        role: AbsRole,
    ) -> Result<AbsCostHandle> {
        let start = self.abs_terms.len();
        for (var, target, weight) in pairs {
            let problem = if var.0 >= self.vars.len() {
                Some(Error::InvalidRequest(format!("unknown LP variable #{}", var.0)))
            } else if !(weight >= 0.0) || !weight.is_finite() {
                Some(Error::InvalidCost(format!("weight {weight} is negative or not finite")))
            } else if !target.is_finite() {
                Some(Error::InvalidCost(format!("target {target} is not finite")))
            } else {
                None
            };
            if let Some(e) = problem {
                self.abs_terms.truncate(start);
                return Err(e);
            }
            self.abs_terms.push(AbsTerm {
                var,
                target,
                weight,
                role,
            });
        }
        Ok(AbsCostHandle {
            start,
            end: self.abs_terms.len(),
        })
    }

    /// Multiplies every objective coefficient and absolute-value weight by
    /// `alpha > 0`.
    pub fn scale_objective(&mut self, alpha: f64) -> Result<()> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidCost(format!("scale {alpha} must be positive")));
        }
        self.objective.iter_mut().for_each(|t| t.1 *= alpha);
        self.abs_terms
            .iter_mut()
            .filter(|t| t.role == AbsRole::Objective)
            .for_each(|t| t.weight *= alpha);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn abs_terms(&self) -> &[AbsTerm] {
        &self.abs_terms
    }

    fn check_vars(&self, vars: impl IntoIterator<Item = VarId>) -> Result<()> {
        for v in vars {
            if v.0 >= self.vars.len() {
                return Err(Error::InvalidRequest(format!("unknown LP variable #{}", v.0)));
            }
        }
        Ok(())
    }

    /// Writes the model in CPLEX LP text format. Absolute-value terms appear
    /// in epigraph form with auxiliary variables `abs_<k>`.
    pub fn write_lp(&self, out: &mut impl Write) -> io::Result<()> {
        let name = |v: VarId| sanitize(&self.vars[v.0].name, v.0);
        writeln!(out, "Minimize")?;
        let mut obj: Vec<String> = self
            .objective
            .iter()
            .map(|&(v, a)| format!("{} {}", signed(a), name(v)))
            .collect();
        obj.extend(
            self.abs_terms
                .iter()
                .enumerate()
                .filter(|(_, t)| t.role == AbsRole::Objective)
                .map(|(k, t)| format!("{} abs_{k}", signed(t.weight))),
        );
        if obj.is_empty() {
            obj.push("0 ".to_string() + &name(VarId(0)));
        }
        writeln!(out, " obj: {}", obj.join(" "))?;
        writeln!(out, "Subject To")?;
        for (r, c) in self.constraints.iter().enumerate() {
            let lhs: Vec<String> = c
                .terms
                .iter()
                .map(|&(v, a)| format!("{} {}", signed(a), name(v)))
                .collect();
            writeln!(out, " c{r}: {} {} {}", lhs.join(" "), c.relation.symbol(), c.rhs)?;
        }
        for (k, t) in self.abs_terms.iter().enumerate() {
            writeln!(out, " abs_{k}_hi: abs_{k} - {} >= {}", name(t.var), -t.target)?;
            writeln!(out, " abs_{k}_lo: abs_{k} + {} >= {}", name(t.var), t.target)?;
        }
        for (b, budget) in self.budgets.iter().enumerate() {
            let lhs: Vec<String> = self
                .abs_terms
                .iter()
                .enumerate()
                .filter(|(_, t)| t.role == AbsRole::Budget(b))
                .map(|(k, t)| format!("{} abs_{k}", signed(t.weight)))
                .collect();
            writeln!(out, " budget{b}: {} <= {budget}", lhs.join(" "))?;
        }
        writeln!(out, "Bounds")?;
        for (i, v) in self.vars.iter().enumerate() {
            let n = sanitize(&v.name, i);
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (false, false) => writeln!(out, " {n} free")?,
                (true, false) => writeln!(out, " {n} >= {}", v.lower)?,
                (false, true) => writeln!(out, " -inf <= {n} <= {}", v.upper)?,
                (true, true) => writeln!(out, " {} <= {n} <= {}", v.lower, v.upper)?,
            }
        }
        writeln!(out, "End")
    }
}

fn signed(a: f64) -> String {
    if a < 0.0 {
        format!("- {}", -a)
    } else {
        format!("+ {a}")
    }
}

fn sanitize(name: &str, index: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if cleaned.is_empty() || cleaned.starts_with(|c: char| c.is_ascii_digit()) {
        format!("x{index}_{cleaned}")
    } else {
        cleaned
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per model variable; empty unless optimal.
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: u64,
}

impl LpSolution {
    pub fn value(&self, v: VarId) -> f64 {
        self.values[v.0]
    }

    /// `Σ w_k |x_k - c_k|` over the terms of `handle`.
    pub fn abs_cost(&self, model: &LpModel, handle: AbsCostHandle) -> f64 {
        model.abs_terms[handle.start..handle.end]
            .iter()
            .map(|t| t.weight * (self.values[t.var.0] - t.target).abs())
            .sum()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn solve_lp(model: &LpModel) -> Result<LpSolution> {
    solve_lp_with(model, AbsEncoding::Auto)
}

/// How an original variable maps into the lowered problem.
enum Lowered {
    Direct(microlp::Variable),
    /// `x = target + up - down`.
    Split {
        target: f64,
        up: microlp::Variable,
        down: microlp::Variable,
    },
}

pub fn solve_lp_with(model: &LpModel, encoding: AbsEncoding) -> Result<LpSolution> {
    let nvars = model.vars.len();
    let mut split_target: Vec<Option<f64>> = vec![None; nvars];
    let mut splittable = vec![encoding == AbsEncoding::Auto; nvars];
    for t in &model.abs_terms {
        let i = t.var.0;
        match split_target[i] {
            None => split_target[i] = Some(t.target),
            Some(c) if c == t.target => {}
            Some(_) => splittable[i] = false,
        }
    }
    let split_at = |i: usize| split_target[i].filter(|_| splittable[i]);

    let mut obj_coef = vec![0.0; nvars];
    for &(v, a) in &model.objective {
        obj_coef[v.0] += a;
    }
    let mut abs_weight = vec![0.0; nvars];
    for t in model.abs_terms.iter().filter(|t| t.role == AbsRole::Objective) {
        abs_weight[t.var.0] += t.weight;
    }

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut constant = 0.0;
    let mut lowered = Vec::with_capacity(nvars);
    for (i, var) in model.vars.iter().enumerate() {
        let a = obj_coef[i];
        match split_at(i) {
            Some(c) => {
                let up_bounds = ((var.lower - c).max(0.0), (var.upper - c).max(0.0));
                let down_bounds = ((c - var.upper).max(0.0), (c - var.lower).max(0.0));
                let up = problem.add_var(abs_weight[i] + a, up_bounds);
                let down = problem.add_var(abs_weight[i] - a, down_bounds);
                constant += a * c;
                lowered.push(Lowered::Split {
                    target: c,
                    up,
                    down,
                });
            }
            None => lowered.push(Lowered::Direct(problem.add_var(a, (var.lower, var.upper)))),
        }
    }
    // Epigraph variables for terms that could not be split; budget rows
    // collect `w (u + w')` or `w t` per term.
    let mut budget_rows: Vec<LinearExpr> = model.budgets.iter().map(|_| LinearExpr::empty()).collect();
    for t in &model.abs_terms {
        let magnitude: Vec<(microlp::Variable, f64)> = match lowered[t.var.0] {
            Lowered::Split { up, down, .. } => vec![(up, 1.0), (down, 1.0)],
            Lowered::Direct(x) => {
                let obj = if t.role == AbsRole::Objective { t.weight } else { 0.0 };
                let aux = problem.add_var(obj, (0.0, f64::INFINITY));
                problem.add_constraint([(aux, 1.0), (x, -1.0)], ComparisonOp::Ge, -t.target);
                problem.add_constraint([(aux, 1.0), (x, 1.0)], ComparisonOp::Ge, t.target);
                vec![(aux, 1.0)]
            }
        };
        if let AbsRole::Budget(b) = t.role {
            for (x, a) in magnitude {
                budget_rows[b].add(x, a * t.weight);
            }
        }
    }
    for c in &model.constraints {
        let mut expr = LinearExpr::empty();
        let mut rhs = c.rhs;
        for &(v, a) in &c.terms {
            match lowered[v.0] {
                Lowered::Direct(x) => expr.add(x, a),
                Lowered::Split { target, up, down } => {
                    expr.add(up, a);
                    expr.add(down, -a);
                    rhs -= a * target;
                }
            }
        }
        let op = match c.relation {
            Relation::Le => ComparisonOp::Le,
            Relation::Eq => ComparisonOp::Eq,
            Relation::Ge => ComparisonOp::Ge,
        };
        problem.add_constraint(expr, op, rhs);
    }
    for (row, &budget) in budget_rows.into_iter().zip(&model.budgets) {
        problem.add_constraint(row, ComparisonOp::Le, budget);
    }

    let outcome = match problem.solve() {
        Ok(o) => o,
        Err(microlp::Error::Infeasible) => return Ok(non_optimal(LpStatus::Infeasible)),
        Err(microlp::Error::Unbounded) => return Ok(non_optimal(LpStatus::Unbounded)),
        Err(e) => return Err(Error::NumericalFailure(format!("LP backend: {e}"))),
    };
    let solution = match outcome {
        SolveOutcome::Solution(s) => s,
        SolveOutcome::Interrupted(_) => {
            return Err(Error::NumericalFailure("LP solve was interrupted".into()))
        }
    };
    let values: Vec<f64> = lowered
        .iter()
        .map(|l| match *l {
            Lowered::Direct(x) => solution.var_value(x),
            Lowered::Split { target, up, down } => {
                target + solution.var_value(up) - solution.var_value(down)
            }
        })
        .collect();
    let objective = solution.objective() + constant;
    let result = LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
        iterations: solution.stats().lp_iterations,
    };
    check_feasible(model, &result)?;
    Ok(result)
}

fn non_optimal(status: LpStatus) -> LpSolution {
    LpSolution {
        status,
        values: Vec::new(),
        objective: f64::NAN,
        iterations: 0,
    }
}

fn check_feasible(model: &LpModel, sol: &LpSolution) -> Result<()> {
    for (i, v) in model.vars.iter().enumerate() {
        let x = sol.values[i];
        let scale = 1f64.max(x.abs());
        if !x.is_finite() || x < v.lower - FEASIBILITY_TOL * scale || x > v.upper + FEASIBILITY_TOL * scale {
            return Err(Error::NumericalFailure(format!(
                "variable {} = {x} violates bounds [{}, {}]",
                v.name, v.lower, v.upper
            )));
        }
    }
    for (b, &budget) in model.budgets.iter().enumerate() {
        let used: f64 = model
            .abs_terms
            .iter()
            .filter(|t| t.role == AbsRole::Budget(b))
            .map(|t| t.weight * (sol.values[t.var.0] - t.target).abs())
            .sum();
        if used > budget + FEASIBILITY_TOL * budget.abs().max(1.0) {
            return Err(Error::NumericalFailure(format!(
                "budget {b} exceeded: {used} > {budget}"
            )));
        }
    }
    for (r, c) in model.constraints.iter().enumerate() {
        let mut lhs = 0.0;
        let mut largest = c.rhs.abs();
        for &(v, a) in &c.terms {
            let term = a * sol.values[v.0];
            lhs += term;
            largest = largest.max(term.abs());
        }
        let tol = FEASIBILITY_TOL * largest.max(1.0);
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs + tol,
            Relation::Ge => lhs >= c.rhs - tol,
            Relation::Eq => (lhs - c.rhs).abs() <= tol,
        };
        if !ok {
            return Err(Error::NumericalFailure(format!(
                "constraint {r} violated: lhs {lhs} {} rhs {}",
                c.relation.symbol(),
                c.rhs
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_constraint() {
        let mut m = LpModel::new();
        let x = m.free_var("x");
        m.add_constraint([(x, 1.0)], Relation::Ge, 3.0).unwrap();
        m.add_objective(x, 1.0).unwrap();
        let s = solve_lp(&m).unwrap();
        assert!(s.is_optimal());
        assert!((s.value(x) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_equalities_are_infeasible() {
        let mut m = LpModel::new();
        let x = m.free_var("x");
        m.add_constraint([(x, 1.0)], Relation::Eq, 1.0).unwrap();
        m.add_constraint([(x, 1.0)], Relation::Eq, 2.0).unwrap();
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction_is_reported() {
        let mut m = LpModel::new();
        let x = m.free_var("x");
        m.add_objective(x, -1.0).unwrap();
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn abs_term_of_fixed_variable() {
        for enc in [AbsEncoding::Auto, AbsEncoding::Epigraph] {
            let mut m = LpModel::new();
            let x = m.add_var("x", 7.0, 7.0).unwrap();
            let h = m.encode_abs_cost([(x, 5.0, 1.0)]).unwrap();
            let s = solve_lp_with(&m, enc).unwrap();
            assert!((s.objective - 2.0).abs() < 1e-12);
            assert!((s.abs_cost(&m, h) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weights_give_zero_objective() {
        let mut m = LpModel::new();
        let x = m.free_var("x");
        m.add_constraint([(x, 1.0)], Relation::Ge, 10.0).unwrap();
        m.encode_abs_cost([(x, 0.0, 0.0)]).unwrap();
        let s = solve_lp(&m).unwrap();
        assert_eq!(s.objective, 0.0);
        assert!(s.value(x) >= 10.0 - 1e-9);
    }

    #[test]
    fn negative_weight_rejected() {
        let mut m = LpModel::new();
        let x = m.free_var("x");
        assert!(matches!(
            m.encode_abs_cost([(x, 0.0, -1.0)]),
            Err(Error::InvalidCost(_))
        ));
        assert!(m.abs_terms().is_empty());
    }

    #[test]
    fn linear_objective_on_split_variable() {
        // min |x - 2| + 0.5 x  with x in [-3, 10]: optimum at x = 2 (slope
        // -0.5 left of 2, 1.5 right of 2).
        for enc in [AbsEncoding::Auto, AbsEncoding::Epigraph] {
            let mut m = LpModel::new();
            let x = m.add_var("x", -3.0, 10.0).unwrap();
            m.encode_abs_cost([(x, 2.0, 1.0)]).unwrap();
            m.add_objective(x, 0.5).unwrap();
            let s = solve_lp_with(&m, enc).unwrap();
            assert!((s.value(x) - 2.0).abs() < 1e-12, "{enc:?}");
            assert!((s.objective - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_row_supports_lexicographic_tie_break() {
        for enc in [AbsEncoding::Auto, AbsEncoding::Epigraph] {
            let mut m = LpModel::new();
            let x = m.add_var("x", 0.0, f64::INFINITY).unwrap();
            let y = m.add_var("y", 0.0, f64::INFINITY).unwrap();
            m.add_constraint([(x, 1.0), (y, 1.0)], Relation::Eq, 2.0).unwrap();
            let primary = m.encode_abs_cost([(x, 0.0, 1.0), (y, 0.0, 1.0)]).unwrap();
            let first = solve_lp_with(&m, enc).unwrap();
            assert!((first.objective - 2.0).abs() < 1e-12);

            let mut second = m.clone();
            let budget = second.objective_to_budget(primary, first.objective).unwrap();
            second.encode_abs_cost([(x, 2.0, 1.0)]).unwrap();
            let s = solve_lp_with(&second, enc).unwrap();
            assert!((s.value(x) - 2.0).abs() < 1e-12, "{enc:?}");
            assert!(s.abs_cost(&second, budget) <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn dump_mentions_every_constraint() {
        let mut m = LpModel::new();
        let x = m.add_var("R[0,0]", -1.0, 1.0).unwrap();
        let v = m.free_var("v");
        m.add_constraint([(x, 1.0), (v, -1.0)], Relation::Le, 0.0).unwrap();
        m.encode_abs_cost([(x, 0.5, 2.0)]).unwrap();
        let mut buf = Vec::new();
        m.write_lp(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("c0: + 1 R_0_0_ - 1 v <= 0"));
        assert!(text.contains("abs_0_hi"));
        assert!(text.contains(" v free"));
    }
}
