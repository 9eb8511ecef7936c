//! `qadc`: validation, rate computation, optimization, simulation and
//! verification for action-dependent quantum channel models.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qadc::channels::ChannelDiagnostics;
use qadc::digest::{bytes_digest, model_digest, strategy_digest};
use qadc::divergences::{mutual_information, von_neumann_entropy};
use qadc::io::{round_sig15, ChannelFile, ModelFile, StateFile, StrategyFile};
use qadc::oneshot::{default_alpha_grid, monte_carlo_expected_error, nu2, CodeParams, EncoderMode, MonteCarloConfig};
use qadc::rate::{achievable_rate, assemble, optimize_rate, ActionModel, OptimizerConfig, Strategy};
use qadc::rng::GENERATOR_NAME;
use qadc::verify::{run_suite, SUITES};
use qadc::{Error, Real};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  unreadable file, malformed JSON (line and column reported) or bad usage
  3  semantic violation: invalid state, channel, strategy or register mismatch
  4  linear-algebra failure (non-Hermitian input, singular function, bad subsystem)
  5  invalid operation arguments (divergence order, partition, distribution, code size)
  6  construction exceeds the size limit
  7  a verification suite failed
  8  the report could not be written
  9  internal error

Set QADC_LOG=debug for progress messages on stderr.";

#[derive(Parser)]
#[command(name = "qadc", version, about = "Rates and one-shot codes for action-dependent quantum channels", after_help = EXIT_CODES)]
struct Cli {
    /// Print failures as a JSON object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a state, channel, model or strategy file.
    Validate {
        path: PathBuf,
        /// Model to check a strategy file against.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Entropies of a state, or a summary of a model and strategy.
    Info {
        #[arg(long, conflicts_with = "model")]
        state: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, requires = "model")]
        strategy: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Achievable rate of a strategy.
    Rate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Search for a strategy with a large achievable rate.
    Optimize {
        #[arg(long)]
        model: PathBuf,
        /// Auxiliary alphabet sizes, e.g. `V=2,U=2`. Defaults to d_S*d_A for both.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        sweeps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Also write the best strategy as a strategy file.
        #[arg(long)]
        save_strategy: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte-Carlo error of random codes and the analytic bound.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        /// Number of messages (power of two).
        #[arg(long = "M", default_value_t = 2)]
        m: usize,
        /// Subcodebook size (power of two).
        #[arg(long = "L", default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `ideal_average` or `exact_uhlmann`.
        #[arg(long, default_value = "ideal_average")]
        mode: String,
        /// Comma-separated orders in (0, 1/2); defaults to 0.05, 0.10, ..., 0.45.
        #[arg(long)]
        alpha_grid: Option<String>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run numerical verification suites.
    Verify {
        #[arg(long, default_value = "lemmas")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    line: Option<usize>,
    column: Option<usize>,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code, kind, message: message.into(), line: None, column: None }
    }

    fn semantic(path: &Path, e: Error) -> Self {
        Failure::new(3, "semantic", format!("{}: {}", path.display(), e))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Format(_) => (2, "format"),
            Error::RegisterMismatch(_)
            | Error::InvalidState(_)
            | Error::InvalidChannel(_)
            | Error::InvalidPurification(_)
            | Error::ZeroDimension(_) => (3, "semantic"),
            Error::NotHermitian(_)
            | Error::SingularFunction(_)
            | Error::DuplicateSubsystem(_)
            | Error::UnknownSubsystem(_)
            | Error::Numerical(_) => (4, "linear_algebra"),
            Error::BadOrder(_)
            | Error::BadPartition(_)
            | Error::BadDistribution(_)
            | Error::BadOperatorRange(_)
            | Error::ReferenceTooLarge { .. }
            | Error::BadCodeParams(_) => (5, "argument"),
            Error::TooLarge { .. } => (6, "too_large"),
        };
        Failure::new(code, kind, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

struct Input {
    path: PathBuf,
    bytes: Vec<u8>,
}

impl Input {
    fn read(path: &Path) -> Result<Self, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::new(2, "io", format!("{}: {}", path.display(), e)))?;
        Ok(Input { path: path.to_path_buf(), bytes })
    }

    fn parse<D: serde::de::DeserializeOwned>(&self) -> Result<D, Failure> {
        serde_json::from_slice(&self.bytes).map_err(|e| {
            let mut f = Failure::new(2, "parse", format!("{}: {}", self.path.display(), e));
            f.line = Some(e.line());
            f.column = Some(e.column());
            f
        })
    }

    fn digest(&self) -> String {
        bytes_digest(&self.bytes)
    }
}

fn load_model(path: &Path) -> Result<(Input, ActionModel<f64>), Failure> {
    let input = Input::read(path)?;
    let file: ModelFile = input.parse()?;
    let model = file.to_model().map_err(|e| Failure::semantic(path, e))?;
    Ok((input, model))
}

fn load_strategy(path: &Path, model: &ActionModel<f64>) -> Result<(Input, Strategy<f64>), Failure> {
    let input = Input::read(path)?;
    let file: StrategyFile = input.parse()?;
    let strategy = file.to_strategy().map_err(|e| Failure::semantic(path, e))?;
    strategy.check(model).map_err(|e| Failure::semantic(path, e))?;
    Ok((input, strategy))
}

/// Rounds every non-integer number to 15 significant digits.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig15).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_numbers),
        Value::Object(m) => m.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn to_value<S: serde::Serialize>(x: &S) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::new(9, "internal", e.to_string()))
}

fn emit(
    command: &str,
    inputs: &[(&str, &Input)],
    seeds: BTreeMap<&str, u64>,
    results: Value,
    out: &OutArgs,
) -> Result<(), Failure> {
    let digests: BTreeMap<&str, String> = inputs.iter().map(|(role, i)| (*role, i.digest())).collect();
    let mut report = json!({
        "command": command,
        "inputs_digest": digests,
        "seeds": seeds,
        "library_version": env!("CARGO_PKG_VERSION"),
        "generator": GENERATOR_NAME,
        "results": results,
    });
    round_numbers(&mut report);
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::new(9, "internal", e.to_string()))?;
    text.push('\n');
    write_text(out.out.as_deref(), &text)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let res = match path {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure::new(8, "output", e.to_string()))
}

fn channel_ok(d: &ChannelDiagnostics) -> Option<String> {
    let tol = f64::channel_tol();
    if d.tp_residual > tol {
        Some(format!("trace-preservation residual {}", d.tp_residual))
    } else if d.cp_min_eigenvalue < -tol {
        Some(format!("Choi matrix has negative eigenvalue {}", d.cp_min_eigenvalue))
    } else {
        None
    }
}

fn validate(path: &Path, model: Option<&Path>) -> Outcome {
    let input = Input::read(path)?;
    let raw: Value = input.parse()?;
    let keys = raw.as_object().map(|m| m.keys().cloned().collect::<Vec<_>>()).unwrap_or_default();
    let has = |k: &str| keys.iter().any(|x| x == k);
    let mut violations: Vec<String> = Vec::new();
    let (kind, diagnostics) = if has("action_channel") {
        let file: ModelFile = input.parse()?;
        let mut diag = serde_json::Map::new();
        if let Err(e) = file.check_registers() {
            violations.push(e.to_string());
        }
        for (name, ch) in [("action_channel", &file.action_channel), ("comm_channel", &file.comm_channel)] {
            match ch.diagnose() {
                Ok(d) => {
                    if let Some(v) = channel_ok(&d) {
                        violations.push(format!("{}: {}", name, v));
                    }
                    diag.insert(name.into(), to_value(&d)?);
                }
                Err(e) => violations.push(format!("{}: {}", name, e)),
            }
        }
        if violations.is_empty() {
            if let Err(e) = file.to_model::<f64>() {
                violations.push(e.to_string());
            }
        }
        ("model", Value::Object(diag))
    } else if has("p_vu") {
        let file: StrategyFile = input.parse()?;
        let mut diag = serde_json::Map::new();
        for (i, st) in file.action_states.iter().enumerate() {
            match st.diagnose() {
                Ok(d) => {
                    if let Some(v) = d.violation() {
                        violations.push(format!("action_states[{}]: {}", i, v));
                    }
                    diag.insert(format!("action_states[{}]", i), to_value(&d)?);
                }
                Err(e) => violations.push(format!("action_states[{}]: {}", i, e)),
            }
        }
        for (i, ch) in file.encoders.iter().enumerate() {
            match ch.diagnose() {
                Ok(d) => {
                    if let Some(v) = channel_ok(&d) {
                        violations.push(format!("encoders[{}]: {}", i, v));
                    }
                    diag.insert(format!("encoders[{}]", i), to_value(&d)?);
                }
                Err(e) => violations.push(format!("encoders[{}]: {}", i, e)),
            }
        }
        if violations.is_empty() {
            match file.to_strategy::<f64>() {
                Ok(s) => {
                    if let Some(mp) = model {
                        let (_, m) = load_model(mp)?;
                        if let Err(e) = s.check(&m) {
                            violations.push(e.to_string());
                        }
                    }
                }
                Err(e) => violations.push(e.to_string()),
            }
        }
        ("strategy", Value::Object(diag))
    } else if has("kraus") {
        let file: ChannelFile = input.parse()?;
        let d = file.diagnose()?;
        if let Some(v) = channel_ok(&d) {
            violations.push(v);
        }
        ("channel", to_value(&d)?)
    } else if has("matrix") {
        let file: StateFile = input.parse()?;
        let d = file.diagnose()?;
        if let Some(v) = d.violation() {
            violations.push(v);
        }
        ("state", to_value(&d)?)
    } else {
        return Err(Failure::new(
            3,
            "semantic",
            format!("{}: not a state, channel, model or strategy file", path.display()),
        ));
    };
    let mut report = json!({
        "file": path.display().to_string(),
        "kind": kind,
        "valid": violations.is_empty(),
        "violations": violations,
        "diagnostics": diagnostics,
    });
    round_numbers(&mut report);
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::new(9, "internal", e.to_string()))? + "\n";
    write_text(None, &text)?;
    if violations.is_empty() {
        Ok(0)
    } else {
        Err(Failure::new(3, "semantic", violations.join("; ")))
    }
}

fn state_info(path: &Path) -> Result<(Input, Value), Failure> {
    let input = Input::read(path)?;
    let file: StateFile = input.parse()?;
    let rho = file.to_state::<f64>().map_err(|e| Failure::semantic(path, e))?;
    let names: Vec<String> = rho.register().names().map(str::to_string).collect();
    let mut marginals = BTreeMap::new();
    for n in &names {
        marginals.insert(n.clone(), von_neumann_entropy(&rho.partial_trace(&[n.as_str()])?)?);
    }
    let mut pairs = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let mi = mutual_information(&rho, &[&names[i]], &[&names[j]])?;
            pairs.push(json!({ "a": names[i], "b": names[j], "value": mi }));
        }
    }
    let mut out = json!({
        "register": file.register,
        "entropy": von_neumann_entropy(&rho)?,
        "marginal_entropies": marginals,
        "pairwise_mutual_information": pairs,
    });
    if names.len() == 2 {
        out["mutual_information"] = pairs[0]["value"].clone();
    }
    Ok((input, out))
}

fn model_info(model_path: &Path, strategy_path: Option<&Path>) -> Result<(Vec<Input>, Value), Failure> {
    let (mi, model) = load_model(model_path)?;
    let dims: BTreeMap<&str, usize> = ["G", "S", "S0", "A", "B"].iter().map(|&n| (n, model.dim(n))).collect();
    let mut out = json!({
        "dims": dims,
        "model_digest": model_digest(&model),
        "action_channel": to_value(&model.action().diagnostics())?,
        "comm_channel": to_value(&model.comm().diagnostics())?,
        "kraus_counts": { "action_channel": model.action().kraus().len(), "comm_channel": model.comm().kraus().len() },
    });
    let mut inputs = vec![mi];
    if let Some(sp) = strategy_path {
        let (si, strategy) = load_strategy(sp, &model)?;
        let bundle = assemble(&model, &strategy)?;
        out["strategy"] = json!({
            "nv": strategy.nv(),
            "nu": strategy.nu(),
            "strategy_digest": strategy_digest(&strategy),
            "rate": to_value(&achievable_rate(&bundle)?)?,
            "nu2": nu2(&bundle)?,
        });
        inputs.push(si);
    }
    Ok((inputs, out))
}

fn parse_dims(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::new(2, "usage", format!("--dims expects `V=<n>,U=<n>`, got `{}`", s));
    let mut v = None;
    let mut u = None;
    for part in s.split(',') {
        let (k, n) = part.split_once('=').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        match k.trim() {
            "V" => v = Some(n),
            "U" => u = Some(n),
            _ => return Err(bad()),
        }
    }
    match (v, u) {
        (Some(v), Some(u)) if v > 0 && u > 0 => Ok((v, u)),
        _ => Err(bad()),
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| {
            x.trim().parse::<f64>().map_err(|_| Failure::new(2, "usage", format!("bad --alpha-grid entry `{}`", x)))
        })
        .collect()
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { path, model } => validate(&path, model.as_deref()),
        Command::Info { state, model, strategy, out } => {
            if let Some(sp) = state {
                let (input, v) = state_info(&sp)?;
                emit("info", &[("state", &input)], BTreeMap::new(), v, &out)?;
            } else if let Some(mp) = model {
                let (inputs, v) = model_info(&mp, strategy.as_deref())?;
                let refs: Vec<(&str, &Input)> = ["model", "strategy"].into_iter().zip(inputs.iter()).collect();
                emit("info", &refs, BTreeMap::new(), v, &out)?;
            } else {
                return Err(Failure::new(2, "usage", "info needs --state or --model"));
            }
            Ok(0)
        }
        Command::Rate { model, strategy, out } => {
            let (mi, m) = load_model(&model)?;
            let (si, s) = load_strategy(&strategy, &m)?;
            let report = achievable_rate(&assemble(&m, &s)?)?;
            emit("rate", &[("model", &mi), ("strategy", &si)], BTreeMap::new(), to_value(&report)?, &out)?;
            Ok(0)
        }
        Command::Optimize { model, dims, restarts, sweeps, seed, workers, save_strategy, out } => {
            let (mi, m) = load_model(&model)?;
            let (nv, nu) = match dims {
                Some(d) => parse_dims(&d)?,
                None => {
                    let n = m.dim("S") * m.dim("A");
                    (n, n)
                }
            };
            let config = OptimizerConfig { restarts, sweeps, seed, workers };
            log::info!("optimizing over |V|={} |U|={} with {} restarts", nv, nu, restarts);
            let res = optimize_rate(&m, nv, nu, &config)?;
            let strategy_file = StrategyFile::from_strategy(&res.strategy);
            if let Some(p) = save_strategy {
                let text = serde_json::to_string_pretty(&strategy_file)
                    .map_err(|e| Failure::new(9, "internal", e.to_string()))?;
                write_text(Some(&p), &(text + "\n"))?;
            }
            let results = json!({
                "dims": { "V": nv, "U": nu },
                "restarts": restarts,
                "sweeps": sweeps,
                "report": to_value(&res.report)?,
                "best_restart": res.best_restart,
                "restart_rates": res.restart_rates,
                "trace": res.trace,
                "strategy": to_value(&strategy_file)?,
            });
            emit("optimize", &[("model", &mi)], BTreeMap::from([("optimizer", seed)]), results, &out)?;
            Ok(0)
        }
        Command::Simulate { model, strategy, m, l, trials, seed, mode, alpha_grid, workers, out } => {
            let mode: EncoderMode = mode.parse().map_err(|e: Error| Failure::new(2, "usage", e.to_string()))?;
            let alpha_grid = match alpha_grid {
                Some(s) => parse_grid(&s)?,
                None => default_alpha_grid(),
            };
            let (mi, md) = load_model(&model)?;
            let (si, st) = load_strategy(&strategy, &md)?;
            let params = CodeParams::new(m, l)?;
            let config = MonteCarloConfig { trials, master_seed: seed, workers, mode, alpha_grid };
            log::info!("simulating {} trials of M={} L={} ({})", trials, m, l, mode);
            let report = monte_carlo_expected_error(&md, &st, params, &config)?;
            emit(
                "simulate",
                &[("model", &mi), ("strategy", &si)],
                BTreeMap::from([("master", seed)]),
                to_value(&report)?,
                &out,
            )?;
            Ok(0)
        }
        Command::Verify { suite, seed, out } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(Failure::new(
                    2,
                    "usage",
                    format!("unknown suite `{}`; expected one of {}", suite, SUITES.join(", ")),
                ));
            }
            let reports = run_suite(&suite, seed)?;
            let pass = reports.iter().all(|r| r.pass);
            let results = json!({ "suite": suite, "pass": pass, "suites": to_value(&reports)? });
            emit("verify", &[], BTreeMap::from([("suite", seed)]), results, &out)?;
            Ok(if pass { 0 } else { 7 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter("QADC_LOG")).init();
    let json_errors = cli.json_errors;
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if json_errors {
                let v = json!({
                    "error": { "code": f.code, "kind": f.kind, "message": f.message, "line": f.line, "column": f.column }
                });
                eprintln!("{}", v);
            } else {
                eprintln!("qadc: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
