//! Benchmark grids: actions scaling, horizon scaling and margin sweeps.

use std::fmt::Write as _;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{derive_seed, generate_random_markov, generate_random_normal, SupportKind};
use crate::markov::{rap_mg, verify_mpe_unique};
use crate::normal::rap;
use crate::types::{Limit, MatrixGame, ModificationRequest, StrategyProfile};
use crate::uniqueness::verify_unique_ne;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkMode {
    ActionsScaling,
    HorizonScaling,
    MarginSweep,
}

/// Margin-sweep curve: which of `(ι, λ)` varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCurve {
    /// `λ = 10^-i`, `ι` fixed at `1e-5`.
    Lambda,
    /// `ι = 10^-i`, `λ` fixed at `1e-5`.
    Iota,
    /// `ι = λ = 10^-i`.
    Both,
}

impl SweepCurve {
    pub const ALL: [SweepCurve; 3] = [SweepCurve::Lambda, SweepCurve::Iota, SweepCurve::Both];
    const FIXED: f64 = 1e-5;

    pub fn margins(self, exponent: usize) -> (f64, f64) {
        let m = 10f64.powi(-(exponent as i32));
        match self {
            SweepCurve::Lambda => (Self::FIXED, m),
            SweepCurve::Iota => (m, Self::FIXED),
            SweepCurve::Both => (m, m),
        }
    }

    fn name(self) -> &'static str {
        match self {
            SweepCurve::Lambda => "lambda",
            SweepCurve::Iota => "iota",
            SweepCurve::Both => "both",
        }
    }
}

/// Fixed 4×4 instance used by the margin sweep.
pub const SWEEP_PAYOFF: [[f64; 4]; 4] = [
    [-0.33, -0.03, 0.68, -0.04],
    [0.16, -0.43, 0.94, -0.45],
    [0.02, 0.85, -0.28, -0.98],
    [-0.57, 0.3, -0.12, -0.17],
];
pub const SWEEP_TARGET: ([f64; 4], [f64; 4]) = ([0.47, 0.53, 0.0, 0.0], [0.42, 0.58, 0.0, 0.0]);

pub fn sweep_instance() -> (MatrixGame, StrategyProfile) {
    let rows: Vec<Vec<f64>> = SWEEP_PAYOFF.iter().map(|r| r.to_vec()).collect();
    let game = MatrixGame::from_rows(&rows).expect("fixed instance is well formed");
    let target = StrategyProfile::new(&SWEEP_TARGET.0, &SWEEP_TARGET.1).expect("fixed target is valid");
    (game, target)
}

/// Sweep instance `index`: the fixed instance for 0, otherwise a random
/// unbounded 4×4 game with a half-support target.
pub fn sweep_case(seed: u64, index: usize) -> Result<(MatrixGame, StrategyProfile)> {
    if index == 0 {
        return Ok(sweep_instance());
    }
    let (game, target) = generate_random_normal(4, SupportKind::Half, derive_seed(seed, 0, index as u64))?;
    Ok((game.with_bound(Limit::Unbounded)?, target))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub mode: BenchmarkMode,
    /// Action counts, horizons, or margin exponents `i` (for `10^-i`).
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    /// Markov state count for horizon scaling.
    pub states: usize,
    /// Markov action count for horizon scaling.
    pub actions: usize,
    /// Margins for the scaling modes.
    pub margin: f64,
    /// When false the time column is left empty so output is byte-stable.
    pub timing: bool,
}

impl BenchmarkConfig {
    /// Desk-scale grid for `mode`.
    pub fn desk(mode: BenchmarkMode) -> Self {
        let sizes = match mode {
            BenchmarkMode::ActionsScaling => vec![2, 4, 8, 16, 32, 64],
            BenchmarkMode::HorizonScaling => vec![1, 2, 4, 8, 16, 32],
            BenchmarkMode::MarginSweep => vec![1, 2, 3, 4],
        };
        Self {
            mode,
            sizes,
            instances: if mode == BenchmarkMode::MarginSweep { 1 } else { 5 },
            seed: 0,
            states: 10,
            actions: 2,
            margin: crate::types::DEFAULT_MARGIN,
            timing: true,
        }
    }

    /// Grid extended to 512 actions or periods.
    pub fn full(mode: BenchmarkMode) -> Self {
        let mut cfg = Self::desk(mode);
        match mode {
            BenchmarkMode::ActionsScaling => cfg.sizes.extend([128, 256, 512]),
            BenchmarkMode::HorizonScaling => cfg.sizes.extend([64, 128, 256, 512]),
            BenchmarkMode::MarginSweep => {}
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        // Sweep sizes are exponents, so 0 (margins of 1) is allowed there.
        let zero_ok = self.mode == BenchmarkMode::MarginSweep;
        if self.sizes.is_empty() || (!zero_ok && self.sizes.contains(&0)) {
            return Err(Error::InvalidRequest("sizes must be a non-empty list of positive integers".into()));
        }
        if self.instances == 0 || self.states == 0 || self.actions == 0 {
            return Err(Error::InvalidRequest("instances, states and actions must be positive".into()));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::InvalidRequest("margin must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub size: usize,
    /// Margin-sweep rows only.
    pub curve: Option<SweepCurve>,
    pub iota: f64,
    pub lambda: f64,
    pub n_instances: usize,
    pub worst_time_s: f64,
    /// Largest final cost among certified outputs.
    pub worst_cost: f64,
    /// Cost of each run, in instance order; NaN for failed runs.
    pub costs: Vec<f64>,
    pub all_certified: bool,
    pub failures: Vec<String>,
}

struct Run {
    time: f64,
    outcome: std::result::Result<f64, String>,
}

fn run_normal(game: &MatrixGame, target: &StrategyProfile, iota: f64, lambda: f64, seed: u64) -> Run {
    let request = ModificationRequest::new(target.clone()).bound(game.bound()).margins(iota, lambda).seed(seed);
    let start = Instant::now();
    let result = rap(game, &request);
    let time = start.elapsed().as_secs_f64();
    let outcome = result.map_err(|e| e.to_string()).and_then(|r| {
        // Certify from scratch rather than trusting the solver's own check.
        match verify_unique_ne(&r.modified, target, Default::default()) {
            Ok(c) if c.valid => Ok(r.cost),
            Ok(c) => Err(format!("certificate failed: {:?}", c.failures())),
            Err(e) => Err(e.to_string()),
        }
    });
    Run { time, outcome }
}

fn run_markov(cfg: &BenchmarkConfig, horizon: usize, seed: u64) -> Run {
    let (game, policy) = match generate_random_markov(cfg.states, cfg.actions, horizon, seed) {
        Ok(x) => x,
        Err(e) => return Run { time: 0.0, outcome: Err(e.to_string()) },
    };
    let request = ModificationRequest::new(policy.clone())
        .bound(game.bound())
        .margins(cfg.margin, cfg.margin)
        .seed(seed);
    let start = Instant::now();
    let result = rap_mg(&game, &request);
    let time = start.elapsed().as_secs_f64();
    let outcome = result.map_err(|e| e.to_string()).and_then(|r| {
        match verify_mpe_unique(&r.modified, &policy, Default::default()) {
            Ok(v) if v.valid => Ok(r.cost),
            Ok(v) => Err(format!("stages failed certification: {:?}", v.failing_stages())),
            Err(e) => Err(e.to_string()),
        }
    });
    Run { time, outcome }
}

fn collect_row(size: usize, curve: Option<SweepCurve>, iota: f64, lambda: f64, runs: Vec<Run>) -> BenchmarkRow {
    let mut row = BenchmarkRow {
        size,
        curve,
        iota,
        lambda,
        n_instances: runs.len(),
        worst_time_s: 0.0,
        worst_cost: f64::NEG_INFINITY,
        costs: Vec::with_capacity(runs.len()),
        all_certified: true,
        failures: Vec::new(),
    };
    for run in runs {
        row.worst_time_s = row.worst_time_s.max(run.time);
        match run.outcome {
            Ok(cost) => {
                row.worst_cost = row.worst_cost.max(cost);
                row.costs.push(cost);
            }
            Err(msg) => {
                warn!("size {size}: {msg}");
                row.all_certified = false;
                row.failures.push(msg);
                row.costs.push(f64::NAN);
            }
        }
    }
    row
}

/// Runs every grid point of `cfg`. Instances within a grid point run in
/// parallel; each draws from a stream derived from `(seed, size, index)`.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<Vec<BenchmarkRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    match cfg.mode {
        BenchmarkMode::ActionsScaling => {
            for &m in &cfg.sizes {
                let runs: Vec<Run> = (0..cfg.instances)
                    .into_par_iter()
                    .flat_map_iter(|idx| {
                        let seed = derive_seed(cfg.seed, m as u64, idx as u64);
                        // Same seed, so the three targets share one payoff matrix.
                        SupportKind::ALL.into_iter().map(move |kind| {
                            match generate_random_normal(m, kind, seed) {
                                Ok((g, t)) => run_normal(&g, &t, cfg.margin, cfg.margin, seed),
                                Err(e) => Run { time: 0.0, outcome: Err(e.to_string()) },
                            }
                        })
                    })
                    .collect();
                let row = collect_row(m, None, cfg.margin, cfg.margin, runs);
                info!("actions {m}: worst time {:.3}s worst cost {:.4}", row.worst_time_s, row.worst_cost);
                rows.push(row);
            }
        }
        BenchmarkMode::HorizonScaling => {
            for &h in &cfg.sizes {
                let runs: Vec<Run> = (0..cfg.instances)
                    .into_par_iter()
                    .map(|idx| run_markov(cfg, h, derive_seed(cfg.seed, h as u64, idx as u64)))
                    .collect();
                let row = collect_row(h, None, cfg.margin, cfg.margin, runs);
                info!("horizon {h}: worst time {:.3}s worst cost {:.4}", row.worst_time_s, row.worst_cost);
                rows.push(row);
            }
        }
        BenchmarkMode::MarginSweep => {
            let cases = (0..cfg.instances)
                .map(|idx| sweep_case(cfg.seed, idx))
                .collect::<Result<Vec<_>>>()?;
            for curve in SweepCurve::ALL {
                for &i in &cfg.sizes {
                    let (iota, lambda) = curve.margins(i);
                    let runs: Vec<Run> = cases
                        .par_iter()
                        .enumerate()
                        .map(|(idx, (g, t))| {
                            run_normal(g, t, iota, lambda, derive_seed(cfg.seed, i as u64, idx as u64))
                        })
                        .collect();
                    rows.push(collect_row(i, Some(curve), iota, lambda, runs));
                }
            }
        }
    }
    Ok(rows)
}

fn fmt_time(cfg: &BenchmarkConfig, t: f64) -> String {
    if cfg.timing {
        format!("{t:.6}")
    } else {
        String::new()
    }
}

/// CSV for `rows`. Scaling modes use
/// `size,n_instances,worst_time_s,worst_cost,all_certified,supports`;
/// the margin sweep adds the curve and both margins in front.
pub fn write_csv(cfg: &BenchmarkConfig, rows: &[BenchmarkRow]) -> String {
    let mut out = String::new();
    match cfg.mode {
        BenchmarkMode::MarginSweep => {
            out.push_str("curve,iota,lambda,n_instances,worst_time_s,worst_cost,all_certified\n");
            for r in rows {
                let curve = r.curve.map_or("", SweepCurve::name);
                let _ = writeln!(
                    out,
                    "{curve},{:e},{:e},{},{},{:.9},{}",
                    r.iota,
                    r.lambda,
                    r.n_instances,
                    fmt_time(cfg, r.worst_time_s),
                    r.worst_cost,
                    r.all_certified
                );
            }
        }
        _ => {
            let supports = match cfg.mode {
                BenchmarkMode::ActionsScaling => "independent",
                _ => "full",
            };
            out.push_str("size,n_instances,worst_time_s,worst_cost,all_certified,supports\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.9},{},{supports}",
                    r.size,
                    r.n_instances,
                    fmt_time(cfg, r.worst_time_s),
                    r.worst_cost,
                    r.all_certified
                );
            }
        }
    }
    out
}

/// Least-squares slope `c` of `cost ≈ c·size` through the origin, and
/// whether every row stays within twice that line.
pub fn linear_cost_fit(rows: &[BenchmarkRow]) -> (f64, bool) {
    let (num, den) = rows.iter().fold((0.0, 0.0), |(n, d), r| {
        let m = r.size as f64;
        (n + m * r.worst_cost, d + m * m)
    });
    let c = num / den;
    let ok = rows.iter().all(|r| r.worst_cost <= 2.0 * c * r.size as f64 + 1e-12);
    (c, ok)
}

/// Least-squares slope of `log(time)` against `log(size)` over rows with
/// `size >= min_size`; `None` with fewer than two such rows.
pub fn log_log_time_slope(rows: &[BenchmarkRow], min_size: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.size >= min_size && r.worst_time_s > 0.0)
        .map(|r| ((r.size as f64).ln(), r.worst_time_s.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
