use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gamemod_core::harness::{self, BenchmarkConfig, BenchmarkMode};
use gamemod_core::io::{
    from_json, matrix_csv, to_json, ErpsFile, GameFile, MarkovGameFile, MarkovPolicyFile, MarkovResultFile,
    MarkovVerificationFile, NormalResultFile, ProfileFile, RequestFile,
};
use gamemod_core::types::DEFAULT_MARGIN;
use gamemod_core::uniqueness::DEFAULT_MAX_DIM;
use gamemod_core::{
    build_erps, enumerate_nash, golden, rap_mg, verify_mpe_unique, verify_unique_ne, CostSpec, Error, Tolerances,
};

const AFTER_HELP: &str = "\
Probabilities at or below 1e-12 are treated as outside a strategy's support.

Exit status: 0 on success, 1 when the request is infeasible, 2 when an output
fails certification, 3 on any other error.";

#[derive(Parser)]
#[command(name = "gamemod", version, about = "Install a unique equilibrium in a zero-sum game at minimal cost")]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modify a matrix game so the target profile is its unique equilibrium.
    ModifyNormal(ModifyArgs),
    /// Modify a finite-horizon Markov game so the target policy is its unique
    /// Markov perfect equilibrium.
    ModifyMarkov(ModifyArgs),
    /// Certify whether the target is the unique equilibrium of a game.
    Verify(VerifyArgs),
    /// Build the extended rock-paper-scissors game of a target profile.
    Erps(ErpsArgs),
    /// Enumerate the equilibria of a small matrix game.
    Oracle(OracleArgs),
    /// Run a benchmark grid and write CSV.
    Bench(BenchArgs),
    /// Run the bundled worked examples.
    Golden(GoldenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    /// Unweighted L1 distance.
    L1,
    /// L1 weighted by the target's joint play probabilities.
    Forever,
}

#[derive(Args)]
struct ModifyArgs {
    /// Original game (JSON).
    #[arg(long)]
    game: PathBuf,
    /// Target profile or policy (JSON).
    #[arg(long)]
    target: PathBuf,
    /// Lowest acceptable game value; unbounded when omitted.
    #[arg(long, allow_negative_numbers = true)]
    value_lo: Option<f64>,
    /// Highest acceptable game value; unbounded when omitted.
    #[arg(long, allow_negative_numbers = true)]
    value_hi: Option<f64>,
    /// Bound on modified rewards; overrides the game file's bound.
    #[arg(long)]
    bound: Option<f64>,
    #[arg(long, value_enum, default_value = "l1")]
    cost: CostArg,
    /// Switch-out margin.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    iota: f64,
    /// Reward margin, also the perturbation scale.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl ModifyArgs {
    fn request_file(&self, game_bound: Option<f64>) -> RequestFile {
        RequestFile {
            value_lo: self.value_lo,
            value_hi: self.value_hi,
            bound: self.bound.or(game_bound),
            cost: match self.cost {
                CostArg::L1 => CostSpec::OneTimeL1,
                CostArg::Forever => CostSpec::forever(),
            },
            iota: self.iota,
            lambda: self.lambda,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// Inputs are a Markov game and policy.
    #[arg(long)]
    markov: bool,
    #[arg(long, default_value_t = Tolerances::default().sii_tol)]
    sii_tol: f64,
    #[arg(long, default_value_t = Tolerances::default().inv_tol)]
    inv_tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ErpsFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ErpsArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: ErpsFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    game: PathBuf,
    /// Largest action count accepted.
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ActionsScaling,
    HorizonScaling,
    MarginSweep,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Grid points (actions, horizons or margin exponents); defaults to the
    /// desk-scale grid.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Extend the default grid to 512.
    #[arg(long)]
    full: bool,
    /// Instances per grid point.
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave the time column empty so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GoldenArgs {
    /// Run only this example.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn read_json<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = to_json(value);
    s.push('\n');
    s
}

/// Status the process should exit with once output is written.
#[derive(Debug, PartialEq)]
enum Outcome {
    Ok,
    Infeasible,
    Uncertified,
}

fn modify_normal(args: &ModifyArgs) -> Result<Outcome> {
    let game_file: GameFile = read_json(&args.game)?;
    let target: ProfileFile = read_json(&args.target)?;
    let request = args.request_file(game_file.bound).to_request(target.to_profile()?)?;
    let game = game_file.to_game()?;
    finish(gamemod_core::rap(&game, &request).map(|r| json_line(&NormalResultFile::from(&r))), args)
}

fn modify_markov(args: &ModifyArgs) -> Result<Outcome> {
    let game_file: MarkovGameFile = read_json(&args.game)?;
    let policy: MarkovPolicyFile = read_json(&args.target)?;
    let request = args.request_file(game_file.bound).to_request(policy.to_policy()?)?;
    let game = game_file.to_game()?;
    finish(rap_mg(&game, &request).map(|r| json_line(&MarkovResultFile::from(&r))), args)
}

fn finish(result: gamemod_core::Result<String>, args: &ModifyArgs) -> Result<Outcome> {
    match result {
        Ok(text) => {
            emit(args.output.as_deref(), &text)?;
            Ok(Outcome::Ok)
        }
        Err(Error::InfeasibleRequest(report)) => {
            eprintln!("error: infeasible request: {report}");
            emit(args.output.as_deref(), &json_line(&report))?;
            Ok(Outcome::Infeasible)
        }
        Err(e @ Error::CertificationFailure { .. }) => {
            eprintln!("error: {e}");
            Ok(Outcome::Uncertified)
        }
        Err(e) => Err(e.into()),
    }
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let tol = Tolerances { sii_tol: args.sii_tol, inv_tol: args.inv_tol };
    let (valid, text) = if args.markov {
        let game = read_json::<MarkovGameFile>(&args.game)?.to_game()?;
        let policy = read_json::<MarkovPolicyFile>(&args.target)?.to_policy()?;
        let v = verify_mpe_unique(&game, &policy, tol)?;
        (v.valid, json_line(&MarkovVerificationFile::from(&v)))
    } else {
        let game = read_json::<GameFile>(&args.game)?.to_game()?;
        let profile = read_json::<ProfileFile>(&args.target)?.to_profile()?;
        let c = verify_unique_ne(&game, &profile, tol)?;
        (c.valid, json_line(&c))
    };
    emit(args.output.as_deref(), &text)?;
    Ok(if valid { Outcome::Ok } else { Outcome::Uncertified })
}

fn erps(args: &ErpsArgs) -> Result<Outcome> {
    let profile = read_json::<ProfileFile>(&args.target)?.to_profile()?;
    let e = build_erps(&profile)?;
    let text = match args.format {
        ErpsFormat::Json => json_line(&ErpsFile::from(&e)),
        ErpsFormat::Csv => matrix_csv(&e.matrix),
    };
    emit(args.output.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

#[derive(serde::Serialize)]
struct OracleReport {
    unique: bool,
    face_width: f64,
    equilibria: Vec<OracleEquilibrium>,
}

#[derive(serde::Serialize)]
struct OracleEquilibrium {
    #[serde(flatten)]
    profile: ProfileFile,
    value: f64,
}

fn oracle(args: &OracleArgs) -> Result<Outcome> {
    let game = read_json::<GameFile>(&args.game)?.to_game()?;
    let found = enumerate_nash(&game, args.max_dim)?;
    let report = OracleReport {
        unique: found.is_unique(),
        face_width: found.face_width,
        equilibria: found
            .equilibria
            .iter()
            .map(|(pr, value)| OracleEquilibrium { profile: ProfileFile::from(pr), value: *value })
            .collect(),
    };
    emit(args.output.as_deref(), &json_line(&report))?;
    Ok(Outcome::Ok)
}

fn bench(args: &BenchArgs) -> Result<Outcome> {
    let mode = match args.mode {
        ModeArg::ActionsScaling => BenchmarkMode::ActionsScaling,
        ModeArg::HorizonScaling => BenchmarkMode::HorizonScaling,
        ModeArg::MarginSweep => BenchmarkMode::MarginSweep,
    };
    let mut cfg = if args.full { BenchmarkConfig::full(mode) } else { BenchmarkConfig::desk(mode) };
    if let Some(sizes) = &args.sizes {
        cfg.sizes = sizes.clone();
    }
    if let Some(n) = args.instances {
        cfg.instances = n;
    }
    cfg.seed = args.seed;
    cfg.timing = !args.no_timing;
    let rows = harness::run_benchmark(&cfg)?;
    for row in rows.iter().filter(|r| !r.all_certified) {
        eprintln!("size {}: {} uncertified run(s): {}", row.size, row.failures.len(), row.failures.join("; "));
    }
    emit(args.output.as_deref(), &harness::write_csv(&cfg, &rows))?;
    Ok(if rows.iter().all(|r| r.all_certified) { Outcome::Ok } else { Outcome::Uncertified })
}

fn run_golden(args: &GoldenArgs) -> Result<Outcome> {
    let outcomes = match &args.name {
        Some(name) => vec![golden::run_golden(name)?],
        None => golden::run_golden_examples()?,
    };
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&o.to_string());
        text.push('\n');
    }
    emit(args.output.as_deref(), &text)?;
    Ok(if outcomes.iter().all(|o| o.passed()) { Outcome::Ok } else { Outcome::Uncertified })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::ModifyNormal(a) => modify_normal(a),
        Command::ModifyMarkov(a) => modify_markov(a),
        Command::Verify(a) => verify(a),
        Command::Erps(a) => erps(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
        Command::Golden(a) => run_golden(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Infeasible) => ExitCode::from(1),
        Ok(Outcome::Uncertified) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
