use std::collections::HashMap;
use std::path::PathBuf;

use proptest::prelude::*;
use qadc::io::{ModelFile, StrategyFile};
use qadc::linalg::{min_eigenvalue, Register};
use qadc::oneshot::{
    build_decoder, evaluate_error, hayashi_nagaoka_check, lemma2_check, monte_carlo_expected_error, proposition1_bound,
    sample_codebook, CodeParams, Codebook, EncoderMode, MonteCarloConfig,
};
use qadc::random;
use qadc::rate::{assemble, ActionModel, Strategy};
use qadc::rng::generator;
use qadc::scalar::max_abs;
use qadc::Error;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn load(name: &str) -> (ActionModel<f64>, Strategy<f64>) {
    let m: ModelFile =
        serde_json::from_str(&std::fs::read_to_string(data(&format!("models/{}.json", name))).unwrap()).unwrap();
    let s: StrategyFile =
        serde_json::from_str(&std::fs::read_to_string(data(&format!("strategies/{}.json", name))).unwrap()).unwrap();
    (m.to_model().unwrap(), s.to_strategy().unwrap())
}

// With orthogonal outputs the decoder splits each received point evenly
// among the codewords sitting on it.
fn counting_error(cb: &Codebook) -> f64 {
    let m = cb.u.len();
    let l = cb.v[0].len();
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, row) in cb.v.iter().enumerate() {
        for &v in row {
            *count.entry((cb.u[i], v)).or_default() += 1;
        }
    }
    let mut success = 0.0;
    for (i, row) in cb.v.iter().enumerate() {
        let mut mine: HashMap<(usize, usize), usize> = HashMap::new();
        for &v in row {
            *mine.entry((cb.u[i], v)).or_default() += 1;
        }
        for (x, n) in mine {
            success += (n * n) as f64 / (l * count[&x]) as f64;
        }
    }
    1.0 - success / m as f64
}

#[test]
fn code_sizes_must_be_powers_of_two() {
    assert!(CodeParams::new(3, 2).is_err());
    assert!(CodeParams::new(2, 0).is_err());
    let p = CodeParams::new(4, 8).unwrap();
    assert_eq!((p.r(), p.rs(), p.rate_sum()), (2.0, 3.0, 5.0));
}

#[test]
fn codebooks_are_reproducible_and_follow_the_distribution() {
    let p = vec![vec![0.1, 0.2], vec![0.3, 0.4]];
    let params = CodeParams::new(1024, 8).unwrap();
    let a = sample_codebook(&p, params, 11).unwrap();
    assert_eq!(a, sample_codebook(&p, params, 11).unwrap());
    assert_ne!(a.u, sample_codebook(&p, params, 12).unwrap().u);
    let ones = a.u.iter().filter(|&&u| u == 1).count() as f64 / 1024.0;
    assert!((ones - 0.6).abs() < 0.06);
    let given_u0: Vec<usize> = a.u.iter().zip(&a.v).filter(|(u, _)| **u == 0).flat_map(|(_, r)| r.clone()).collect();
    let frac = given_u0.iter().filter(|&&v| v == 1).count() as f64 / given_u0.len() as f64;
    assert!((frac - 0.75).abs() < 0.05);
}

#[test]
fn decoder_is_a_povm() {
    let mut rng = generator(21);
    let model = qadc::verify::random_qubit_model(&mut rng).unwrap();
    let strategy = qadc::verify::random_qubit_strategy(&mut rng).unwrap();
    let bundle = assemble(&model, &strategy).unwrap();
    let params = CodeParams::new(2, 2).unwrap();
    let cb = sample_codebook(strategy.p_vu(), params, 5).unwrap();
    let dec = build_decoder(&bundle.rho_vub, &cb, params).unwrap();
    let mut total = dec.completion.matrix().clone();
    for b in dec.beta.iter().flatten() {
        assert!(min_eigenvalue(b).unwrap() > -1e-10);
        total += b.matrix();
    }
    assert!(min_eigenvalue(&dec.completion).unwrap() > -1e-9);
    let d = total.nrows();
    assert!(max_abs(&(total - qadc::scalar::CMatrix::identity(d, d))) < 1e-9);
}

#[test]
fn designed_instance_error_matches_the_counting_oracle() {
    let (model, strategy) = load("designed_orthogonal");
    let bundle = assemble(&model, &strategy).unwrap();
    let params = CodeParams::new(2, 2).unwrap();
    for seed in 0..12 {
        let cb = sample_codebook(strategy.p_vu(), params, seed).unwrap();
        let dec = build_decoder(&bundle.rho_vub, &cb, params).unwrap();
        let eval = evaluate_error(&model, &strategy, &bundle, &cb, &dec, EncoderMode::IdealAverage).unwrap();
        assert!((eval.avg_error - counting_error(&cb)).abs() < 1e-9, "seed {}", seed);
        assert!(eval.purified_distance_term.abs() < 1e-12);
    }
}

#[test]
fn hand_built_collision_codebook() {
    let (model, strategy) = load("designed_orthogonal");
    let bundle = assemble(&model, &strategy).unwrap();
    let params = CodeParams::new(2, 2).unwrap();
    // Both messages share u = 0 and one v value: that point is ambiguous.
    let cb = Codebook { u: vec![0, 0], v: vec![vec![3, 5], vec![3, 6]], seed: 0 };
    let dec = build_decoder(&bundle.rho_vub, &cb, params).unwrap();
    let eval = evaluate_error(&model, &strategy, &bundle, &cb, &dec, EncoderMode::IdealAverage).unwrap();
    assert!((eval.avg_error - 0.25).abs() < 1e-9);
    assert!((counting_error(&cb) - 0.25).abs() < 1e-12);
}

#[test]
fn encoder_modes_agree_on_the_identity_model() {
    let (model, strategy) = load("identity_qubit");
    let bundle = assemble(&model, &strategy).unwrap();
    let params = CodeParams::new(2, 1).unwrap();
    let cb = sample_codebook(strategy.p_vu(), params, 2).unwrap();
    let dec = build_decoder(&bundle.rho_vub, &cb, params).unwrap();
    let a = evaluate_error(&model, &strategy, &bundle, &cb, &dec, EncoderMode::IdealAverage).unwrap();
    let b = evaluate_error(&model, &strategy, &bundle, &cb, &dec, EncoderMode::ExactUhlmann).unwrap();
    assert!((a.avg_error - b.avg_error).abs() < 1e-9);
}

#[test]
fn monte_carlo_is_independent_of_workers() {
    let (model, strategy) = load("classical_binary");
    let params = CodeParams::new(2, 2).unwrap();
    let mk = |workers| MonteCarloConfig {
        trials: 16,
        master_seed: 99,
        workers,
        mode: EncoderMode::IdealAverage,
        alpha_grid: vec![0.1, 0.25, 0.4],
    };
    let one = monte_carlo_expected_error(&model, &strategy, params, &mk(1)).unwrap();
    let three = monte_carlo_expected_error(&model, &strategy, params, &mk(3)).unwrap();
    assert_eq!(one, three);
    assert_eq!(one.per_trial_error.len(), 16);
    assert!(one.per_trial_error.iter().all(|e| (0.0..=1.0 + 1e-12).contains(e)));
}

#[test]
fn bound_rejects_orders_outside_the_unit_interval() {
    let (model, strategy) = load("classical_binary");
    let bundle = assemble(&model, &strategy).unwrap();
    let params = CodeParams::new(2, 2).unwrap();
    for a in [0.0, -0.1, 0.5, 1.5] {
        assert!(matches!(proposition1_bound(&bundle, params, a), Err(Error::BadOrder(_))));
    }
    let lo = proposition1_bound(&bundle, CodeParams::new(2, 1).unwrap(), 0.25).unwrap();
    let hi = proposition1_bound(&bundle, CodeParams::new(8, 4).unwrap(), 0.25).unwrap();
    assert!(hi.total >= lo.total);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hayashi_nagaoka_holds(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = generator(seed);
        let r = Register::single("X", d).unwrap();
        let s = random::psd::<f64, _>(r.clone(), d, &mut rng);
        let s = s.scale(1.0 / qadc::linalg::eigenvalues(&s).unwrap()[0]);
        let t = random::psd::<f64, _>(r.clone(), 2, &mut rng);
        let out = hayashi_nagaoka_check(&s, &t).unwrap();
        prop_assert!(out.pass, "slack {}", out.min_eig_slack);
    }

    #[test]
    fn lemma2_holds_on_random_classical_quantum_states(seed in any::<u64>(), rate in 0.1..3.0f64, alpha in 0.01..0.49f64) {
        let mut rng = generator(seed);
        let rho = qadc::verify::random_cq_vub(2, 2, 2, &mut rng).unwrap();
        let out = lemma2_check(&rho, rate, alpha).unwrap();
        prop_assert!(out.pass, "{:?}", out);
    }
}
