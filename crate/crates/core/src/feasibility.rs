//! Feasibility pre-checks for normal-form and Markov modification requests.

use std::fmt;

use serde::Serialize;

use crate::types::{Limit, ModificationRequest, MarkovPolicy, StrategyProfile, ValueRange};

/// A condition that rules out a request.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Row and column supports differ in size. `stage` is `(h, s)` for
    /// Markov requests.
    UnequalSupports {
        stage: Option<(usize, usize)>,
        rows: usize,
        cols: usize,
    },
    /// The requested value range misses the open interval of achievable
    /// values `(-limit, limit)`.
    ValueRangeUnreachable { lo: Limit, hi: Limit, limit: f64 },
    /// The margins leave no room: `(-b+λ+ι, b-λ-ι)` misses the (per-period)
    /// value range.
    MarginTooLarge {
        lo: Limit,
        hi: Limit,
        interior: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnequalSupports { stage: None, rows, cols } => {
                write!(f, "row support has {rows} actions, column support has {cols}")
            }
            Violation::UnequalSupports {
                stage: Some((h, s)),
                rows,
                cols,
            } => write!(
                f,
                "period {h}, state {s}: row support has {rows} actions, column support has {cols}"
            ),
            Violation::ValueRangeUnreachable { lo, hi, limit } => write!(
                f,
                "value range [{lo}, {hi}] does not meet the open interval (-{limit}, {limit})"
            ),
            Violation::MarginTooLarge { lo, hi, interior } => write!(
                f,
                "margins too large: ({}, {interior}) does not meet [{lo}, {hi}]",
                -interior
            ),
        }
    }
}

/// Outcome of a feasibility pre-check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// The modification problem itself has a solution.
    pub feasible: bool,
    /// The margins leave room for the relax-and-perturb construction.
    pub margins_ok: bool,
    pub violations: Vec<Violation>,
    /// Informational remarks that do not affect the verdict.
    pub notes: Vec<String>,
}

impl FeasibilityReport {
    pub fn is_ok(&self) -> bool {
        self.feasible && self.margins_ok
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("feasible");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// `(-limit, limit) ∩ [lo, hi] ≠ ∅` for `limit ∈ (0, ∞]`.
fn meets_open_interval(range: &ValueRange, limit: Limit) -> bool {
    match limit {
        Limit::Unbounded => true,
        Limit::Finite(b) => range.lo_f64() < b && range.hi_f64() > -b,
    }
}

fn scaled(range: &ValueRange, factor: f64) -> ValueRange {
    let s = |x: Limit| match x {
        Limit::Finite(v) => Limit::Finite(v * factor),
        Limit::Unbounded => Limit::Unbounded,
    };
    ValueRange {
        lo: s(range.lo),
        hi: s(range.hi),
    }
}

fn margin_interior(bound: Limit, sow: f64, reward: f64) -> Limit {
    match bound {
        Limit::Finite(b) => Limit::Finite(b - reward - sow),
        Limit::Unbounded => Limit::Unbounded,
    }
}

fn margin_check(
    report: &mut FeasibilityReport,
    per_period: &ValueRange,
    bound: Limit,
    sow: f64,
    reward: f64,
) {
    let interior = margin_interior(bound, sow, reward);
    let ok = match interior {
        Limit::Unbounded => true,
        Limit::Finite(x) => x > 0.0 && meets_open_interval(per_period, interior),
    };
    if !ok {
        report.margins_ok = false;
        report.violations.push(Violation::MarginTooLarge {
            lo: per_period.lo,
            hi: per_period.hi,
            interior: interior.finite().unwrap_or(f64::INFINITY),
        });
    }
    // A sign-flipped reading of the lower endpoint circulates for this
    // precondition; say so when it would give a different answer.
    if let Limit::Finite(x) = interior {
        let flipped_lo = match per_period.lo {
            Limit::Finite(v) => Limit::Finite(-v),
            Limit::Unbounded => Limit::Unbounded,
        };
        let alt = ValueRange {
            lo: flipped_lo,
            hi: per_period.hi,
        };
        let alt_ok = x > 0.0 && alt.lo_f64() <= alt.hi_f64() && meets_open_interval(&alt, interior);
        if alt_ok != ok {
            report.notes.push(format!(
                "margin check uses [lo, hi]; reading the lower endpoint as -lo would give {}",
                if alt_ok { "a pass" } else { "a failure" }
            ));
        }
    }
}

/// Feasibility of a normal-form request: equal support sizes and a value
/// range meeting `(-b, b)`, plus the margin precondition
/// `(-b+λ+ι, b-λ-ι) ∩ [v_lo, v_hi] ≠ ∅`.
pub fn check_feasibility_normal(request: &ModificationRequest<StrategyProfile>) -> FeasibilityReport {
    let mut report = FeasibilityReport {
        feasible: true,
        margins_ok: true,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    let target = &request.target;
    let (rows, cols) = (target.row_support().len(), target.col_support().len());
    if rows != cols {
        report.feasible = false;
        report.violations.push(Violation::UnequalSupports {
            stage: None,
            rows,
            cols,
        });
    }
    push_range_checks(&mut report, request, 1);
    report
}

/// Feasibility of a Markov request: equal support sizes at every stage and a
/// value range meeting `(-Hb, Hb)`, plus the margin precondition against the
/// per-period range `[v_lo/H, v_hi/H]`.
pub fn check_feasibility_markov(request: &ModificationRequest<MarkovPolicy>) -> FeasibilityReport {
    let mut report = FeasibilityReport {
        feasible: true,
        margins_ok: true,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    for (h, stage) in request.target.stages().iter().enumerate() {
        for (s, profile) in stage.iter().enumerate() {
            let (rows, cols) = (profile.row_support().len(), profile.col_support().len());
            if rows != cols {
                report.feasible = false;
                report.violations.push(Violation::UnequalSupports {
                    stage: Some((h, s)),
                    rows,
                    cols,
                });
            }
        }
    }
    push_range_checks(&mut report, request, request.target.horizon());
    report
}

fn push_range_checks<T>(report: &mut FeasibilityReport, request: &ModificationRequest<T>, horizon: usize) {
    let h = horizon as f64;
    let limit = match request.bound {
        Limit::Finite(b) => Limit::Finite(h * b),
        Limit::Unbounded => Limit::Unbounded,
    };
    if !meets_open_interval(&request.value_range, limit) {
        report.feasible = false;
        report.violations.push(Violation::ValueRangeUnreachable {
            lo: request.value_range.lo,
            hi: request.value_range.hi,
            limit: limit.finite().unwrap_or(f64::INFINITY),
        });
        return;
    }
    let per_period = scaled(&request.value_range, 1.0 / h);
    margin_check(
        report,
        &per_period,
        request.bound,
        request.margin_sow,
        request.margin_reward,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(p: &[f64], q: &[f64]) -> ModificationRequest<StrategyProfile> {
        ModificationRequest::new(StrategyProfile::new(p, q).unwrap())
    }

    #[test]
    fn unequal_supports_are_infeasible() {
        let r = check_feasibility_normal(&req(&[0.5, 0.5, 0.0], &[0.3, 0.3, 0.4]));
        assert!(!r.feasible);
        assert!(matches!(
            r.violations[0],
            Violation::UnequalSupports { rows: 2, cols: 3, .. }
        ));
    }

    #[test]
    fn disjoint_value_range_is_infeasible() {
        let r = check_feasibility_normal(
            &req(&[1.0], &[1.0])
                .bound(Limit::Finite(1.0))
                .value_range(ValueRange::new(Limit::Finite(2.0), Limit::Finite(3.0)).unwrap()),
        );
        assert!(!r.feasible);
    }

    #[test]
    fn unbounded_payoffs_are_feasible() {
        let r = check_feasibility_normal(
            &req(&[0.5, 0.5], &[0.2, 0.8])
                .value_range(ValueRange::new(Limit::Finite(-50.0), Limit::Finite(-40.0)).unwrap()),
        );
        assert!(r.is_ok());
    }

    #[test]
    fn endpoint_equal_to_bound_is_infeasible() {
        let r = check_feasibility_normal(
            &req(&[1.0], &[1.0])
                .bound(Limit::Finite(1.0))
                .value_range(ValueRange::new(Limit::Finite(1.0), Limit::Finite(2.0)).unwrap()),
        );
        assert!(!r.feasible);
    }

    #[test]
    fn margins_can_fail_alone() {
        let r = check_feasibility_normal(
            &req(&[1.0], &[1.0])
                .bound(Limit::Finite(1.0))
                .value_range(ValueRange::exactly(0.95))
                .margins(0.05, 0.05),
        );
        assert!(r.feasible);
        assert!(!r.margins_ok);
    }

    #[test]
    fn sign_reading_disagreement_is_noted() {
        let r = check_feasibility_normal(
            &req(&[1.0], &[1.0])
                .bound(Limit::Finite(1.0))
                .value_range(ValueRange::new(Limit::Finite(-0.5), Limit::Finite(-0.4)).unwrap()),
        );
        assert!(r.is_ok());
        assert_eq!(r.notes.len(), 1);
    }
}
