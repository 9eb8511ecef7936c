//! One line per acceptance criterion, then a single assertion over all of
//! them. Run with `cargo test -p qadc-cli --test acceptance -- --nocapture`.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use qadc::divergences::sandwiched_renyi;
use qadc::io::{ModelFile, StrategyFile};
use qadc::linalg::{DensityMatrix, LabeledOperator, Register};
use qadc::oneshot::{default_alpha_grid, monte_carlo_expected_error, CodeParams, EncoderMode, MonteCarloConfig};
use qadc::random;
use qadc::rate::{achievable_rate, assemble, optimize_rate, ActionModel, OptimizerConfig, Strategy};
use qadc::rng::derived;
use qadc::scalar::{c64, CMatrix};
use qadc::verify::{
    divergence_suite, hayashi_nagaoka_suite, lemma1_suite, lemma2_suite, pinching_suite, uhlmann_suite, SuiteReport,
};

const SEED: u64 = 7;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn read_json(rel: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(data(rel)).unwrap()).unwrap()
}

fn load_model(name: &str) -> ActionModel<f64> {
    serde_json::from_value::<ModelFile>(read_json(&format!("models/{}.json", name))).unwrap().to_model().unwrap()
}

fn load_strategy(name: &str) -> Strategy<f64> {
    serde_json::from_value::<StrategyFile>(read_json(&format!("strategies/{}.json", name)))
        .unwrap()
        .to_strategy()
        .unwrap()
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite_detail(r: &SuiteReport) -> String {
    r.checks.iter().map(|(k, c)| format!("{}={:.3e}/{:.0e}", k, c.worst, c.tolerance)).collect::<Vec<_>>().join(" ")
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed.as_secs_f64() < limit_s as f64
}

fn timed(limit_s: u64, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let e = t.elapsed();
    if !within(e, limit_s) {
        o.pass = false;
    }
    o.detail = format!("{} time={:.1}s/{}s", o.detail, e.as_secs_f64(), limit_s);
    o
}

fn from_suite(r: SuiteReport) -> Outcome {
    Outcome { pass: r.pass, detail: format!("cases={} {}", r.cases, suite_detail(&r)) }
}

fn c1() -> Outcome {
    timed(10, || from_suite(pinching_suite(SEED, 200).unwrap()))
}

// Scalar Renyi divergence of two probability vectors.
fn scalar_renyi(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| a.powf(alpha) * b.powf(1.0 - alpha)).sum();
    s.log2() / (alpha - 1.0)
}

fn c2() -> Outcome {
    timed(30, || {
        let suite = divergence_suite(SEED, 100).unwrap();
        // Independent commuting-case check: same eigenbasis, rotated.
        let mut worst: f64 = 0.0;
        for i in 0..100u64 {
            let mut rng = derived(SEED ^ 0xC0FFEE, i);
            let d = 2 + (i as usize % 2);
            let p = random::probabilities::<f64, _>(d, &mut rng);
            let q = random::probabilities::<f64, _>(d, &mut rng);
            let u = random::unitary::<f64, _>(d, &mut rng);
            let rot = |x: &[f64]| {
                let diag = CMatrix::from_fn(d, d, |a, b| if a == b { c64(x[a], 0.0) } else { c64(0.0, 0.0) });
                let m = &u * diag * u.adjoint();
                DensityMatrix::new(LabeledOperator::new(Register::single("X", d).unwrap(), m).unwrap().hermitian_part())
                    .unwrap()
            };
            for alpha in [0.3, 0.5, 0.8, 1.2, 2.0, 3.0] {
                let got = sandwiched_renyi(&rot(&p), &rot(&q), alpha).unwrap().as_f64();
                worst = worst.max((got - scalar_renyi(&p, &q, alpha)).abs());
            }
        }
        let ok = worst <= 1e-9;
        Outcome {
            pass: suite.pass && ok,
            detail: format!("{} scalar_oracle_gap={:.3e}/1e-9", suite_detail(&suite), worst),
        }
    })
}

fn c3() -> Outcome {
    timed(30, || from_suite(hayashi_nagaoka_suite(SEED, 500).unwrap()))
}

fn c4() -> Outcome {
    timed(120, || {
        let r = lemma2_suite(SEED, 50).unwrap();
        let mut o = from_suite(r.clone());
        o.pass &= r.cases == 450;
        o
    })
}

fn c5() -> Outcome {
    timed(180, || from_suite(lemma1_suite(SEED, 10, 500).unwrap()))
}

fn c6() -> Outcome {
    timed(300, || {
        let model = load_model("designed_orthogonal");
        let strategy = load_strategy("designed_orthogonal");
        let fixture = read_json("fixtures/designed_orthogonal.expected.json");
        let exact = fixture["expected_error"].as_f64().unwrap();
        let threshold = fixture["threshold"].as_f64().unwrap();
        let params = CodeParams::new(2, 2).unwrap();
        let mut pass = true;
        let mut means = Vec::new();
        let mut vacuous = 0;
        let mut all = Vec::new();
        for seed in 0..10u64 {
            let cfg = MonteCarloConfig {
                trials: 200,
                master_seed: 1000 + seed,
                workers: 0,
                mode: EncoderMode::IdealAverage,
                alpha_grid: default_alpha_grid(),
            };
            let r = monte_carlo_expected_error(&model, &strategy, params, &cfg).unwrap();
            if r.bound_rhs_min < 1.0 {
                pass &= r.avg_error_exact + r.correction <= r.bound_rhs_min;
            } else {
                vacuous += 1;
            }
            pass &= r.avg_error_exact <= threshold;
            means.push(r.avg_error_exact);
            all.extend(r.per_trial_error);
        }
        let (mean, se) = qadc::oneshot::mean_and_stderr(&all);
        pass &= (mean - exact).abs() <= 4.0 * se;
        let worst = means.iter().cloned().fold(f64::MIN, f64::max);
        Outcome {
            pass,
            detail: format!(
                "max_seed_mean={:.4} threshold={} pooled_mean={:.4}+-{:.4} exact={:.4} bound_vacuous_seeds={}/10",
                worst, threshold, mean, se, exact, vacuous
            ),
        }
    })
}

fn c7() -> Outcome {
    let fixture = read_json("fixtures/classical_binary.expected.json");
    let expect = fixture["r_low"].as_f64().unwrap();
    let rep = achievable_rate(&assemble(&load_model("classical_binary"), &load_strategy("classical_binary")).unwrap())
        .unwrap();
    let gap = (rep.r_low - expect).abs();
    Outcome { pass: gap <= 1e-9, detail: format!("r_low={:.12} oracle={:.12} gap={:.2e}/1e-9", rep.r_low, expect, gap) }
}

fn c8() -> Outcome {
    timed(300, || {
        let cfg = OptimizerConfig { restarts: 16, seed: SEED, ..OptimizerConfig::default() };
        let id = optimize_rate(&load_model("identity_qubit"), 1, 2, &cfg).unwrap();
        let dep = optimize_rate(&load_model("depolarizing_qubit"), 2, 2, &cfg).unwrap();
        let a = id.report.r_low;
        let b = dep.report.r_low;
        Outcome {
            pass: a >= 0.95 && b.abs() <= 1e-6,
            detail: format!("identity_r_low={:.6}/0.95 depolarizing_r_low={:.2e}/1e-6", a, b),
        }
    })
}

fn c9() -> Outcome {
    timed(120, || from_suite(uhlmann_suite(SEED, 100, 20, 10).unwrap()))
}

fn c10() -> Outcome {
    let model = data("models/classical_binary.json");
    let strategy = data("strategies/classical_binary.json");
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_qadc"))
            .args(["simulate", "--model", model.to_str().unwrap(), "--strategy", strategy.to_str().unwrap()])
            .args(["--M", "2", "--L", "2", "--trials", "200", "--seed", "7", "--workers", workers])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let reference = run("1");
    let runs = [run("1"), run("1"), run("4"), run("4")];
    let same = runs.iter().all(|r| *r == reference);
    Outcome { pass: same, detail: format!("runs=5 workers={{1,4}} bytes={} identical={}", reference.len(), same) }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("pinching suite", c1),
        ("divergence suite", c2),
        ("hayashi-nagaoka suite", c3),
        ("lemma 2 suite", c4),
        ("lemma 1 suite", c5),
        ("end-to-end one-shot bound", c6),
        ("classical reduction oracle", c7),
        ("optimizer sanity", c8),
        ("uhlmann and encoder", c9),
        ("determinism", c10),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {:>2} {:<28} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}
