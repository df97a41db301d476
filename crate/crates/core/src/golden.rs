//! Bundled worked examples with their expected outcomes.

use std::fmt;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::io::{from_json, NormalCase};
use crate::normal::{rap, ModificationResult};
use crate::uniqueness::{enumerate_nash, DEFAULT_MAX_DIM};

pub const CORPUS: [(&str, &str); 5] = [
    ("simplified_morra", include_str!("../corpus/simplified_morra.json")),
    ("rpsfw", include_str!("../corpus/rpsfw.json")),
    ("classic_tfm", include_str!("../corpus/classic_tfm.json")),
    ("rpssl", include_str!("../corpus/rpssl.json")),
    ("bottled_water", include_str!("../corpus/bottled_water.json")),
];

/// Largest allowed `|value - expected|` where a value is pinned.
pub const VALUE_TOL: f64 = 1e-6;
pub const RUNTIME_LIMIT: Duration = Duration::from_secs(1);

pub fn load_case(name: &str) -> Option<NormalCase> {
    CORPUS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| from_json(text).expect("bundled corpus parses"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub what: String,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct GoldenOutcome {
    pub name: String,
    pub elapsed: Duration,
    pub result: Option<ModificationResult>,
    pub checks: Vec<Check>,
}

impl GoldenOutcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for GoldenOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}", self.name)?;
        for c in &self.checks {
            write!(f, "\n  [{}] {}", if c.passed { "ok" } else { "!!" }, c.what)?;
        }
        Ok(())
    }
}

struct Checker(Vec<Check>);

impl Checker {
    fn push(&mut self, passed: bool, what: String) {
        self.0.push(Check { what, passed });
    }

    fn at_most(&mut self, label: &str, x: f64, limit: f64) {
        self.push(x <= limit, format!("{label} {x:.6} <= {limit:.3}"));
    }

    // The measured time is kept out of the message so reports are reproducible.
    fn within_runtime(&mut self, elapsed: Duration) {
        self.push(elapsed < RUNTIME_LIMIT, format!("runtime under {} s", RUNTIME_LIMIT.as_secs()));
    }

    fn near(&mut self, label: &str, x: f64, expected: f64, tol: f64) {
        self.push((x - expected).abs() <= tol, format!("{label} {x:.6} = {expected} ± {tol}"));
    }
}

/// Runs one bundled example and evaluates its expectations.
pub fn run_golden(name: &str) -> Result<GoldenOutcome> {
    let case = load_case(name)
        .ok_or_else(|| crate::Error::InvalidRequest(format!("no bundled example named {name}")))?;
    let (game, request) = case.load()?;
    let start = Instant::now();
    let result = rap(&game, &request);
    let elapsed = start.elapsed();
    let mut ck = Checker(Vec::new());
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            ck.push(false, format!("modification failed: {e}"));
            return Ok(GoldenOutcome { name: name.into(), elapsed, result: None, checks: ck.0 });
        }
    };
    ck.push(result.certificate.valid, "certified unique equilibrium".into());
    let (v, cost) = (result.achieved_value, result.cost);
    match name {
        "simplified_morra" => {
            ck.near("value", v, 0.0, VALUE_TOL);
            // L1 distance from the original to the published modified matrix.
            ck.at_most("cost", cost, 0.32 + 0.1);
            ck.within_runtime(elapsed);
        }
        "rpsfw" => {
            ck.near("value", v, 0.0, VALUE_TOL);
            ck.at_most("cost", cost, 4.0 + 0.1);
            ck.within_runtime(elapsed);
        }
        "classic_tfm" => {
            ck.near("value", v, -0.25, VALUE_TOL);
            ck.at_most("cost", cost, 4.0 + 0.1);
            let before = enumerate_nash(&game, DEFAULT_MAX_DIM)?;
            ck.push(
                !before.is_unique(),
                format!("original has several equilibria ({} vertices, face width {:.3e})", before.equilibria.len(), before.face_width),
            );
            let after = enumerate_nash(&result.modified, DEFAULT_MAX_DIM)?;
            ck.push(after.is_exactly(&request.target), "modified game has exactly the target equilibrium".into());
        }
        "rpssl" => {
            ck.near("value", v, 0.0, VALUE_TOL);
            ck.at_most("cost", cost, 1.33 + 0.05);
        }
        "bottled_water" => {
            ck.near("cost", cost, 1.01, 0.02);
            // The random perturbation moves entries by at most the reward margin.
            ck.near("entry (P, NP)", result.modified.payoff()[(0, 1)], -0.01, request.margin_reward);
        }
        _ => {}
    }
    Ok(GoldenOutcome { name: name.into(), elapsed, result: Some(result), checks: ck.0 })
}

/// Runs every bundled example.
pub fn run_golden_examples() -> Result<Vec<GoldenOutcome>> {
    CORPUS.iter().map(|(name, _)| run_golden(name)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_parses() {
        for (name, _) in CORPUS {
            let case = load_case(name).unwrap();
            assert_eq!(case.name, name);
            case.load().unwrap();
        }
        assert!(load_case("missing").is_none());
    }

    #[test]
    fn unknown_example_is_an_error() {
        assert!(run_golden("missing").is_err());
    }
}
