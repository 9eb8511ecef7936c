use proptest::prelude::*;
use qadc::channels::{kraus_to_stinespring, overlap, purify, uhlmann_isometry, KrausChannel};
use qadc::divergences::fidelity;
use qadc::linalg::{eigenvalues, DensityMatrix, LabeledVector, Register};
use qadc::random;
use qadc::rng::generator;
use qadc::scalar::{max_abs, CMatrix};

fn reg1(name: &str, d: usize) -> Register {
    Register::single(name, d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn depolarizing_matches_its_affine_form(seed in any::<u64>(), d in 2usize..5, p in 0.0..1.0f64) {
        let mut rng = generator(seed);
        let rho = random::density::<f64, _>(reg1("A", d), d, &mut rng);
        let out = KrausChannel::depolarizing(reg1("A", d), p).unwrap().apply(&rho).unwrap();
        let expect = rho.matrix() * qadc::scalar::cre(1.0 - p) + CMatrix::identity(d, d) * qadc::scalar::cre(p / d as f64);
        prop_assert!(max_abs(&(out.matrix() - expect)) < 1e-12);
    }

    #[test]
    fn dephasing_matches_its_affine_form(seed in any::<u64>(), d in 2usize..5, p in 0.0..1.0f64) {
        let mut rng = generator(seed);
        let rho = random::density::<f64, _>(reg1("A", d), d, &mut rng);
        let out = KrausChannel::dephasing(reg1("A", d), p).unwrap().apply(&rho).unwrap();
        let expect = CMatrix::from_fn(d, d, |i, j| if i == j { rho.matrix()[(i, j)] } else { rho.matrix()[(i, j)] * qadc::scalar::cre(1.0 - p) });
        prop_assert!(max_abs(&(out.matrix() - expect)) < 1e-12);
    }

    #[test]
    fn random_channels_are_cptp_and_their_dilation_agrees(seed in any::<u64>(), di in 1usize..4, d_o in 1usize..4, k in 1usize..4) {
        let mut rng = generator(seed);
        let ch = random::channel::<f64, _>(reg1("A", di), reg1("B", d_o), k, &mut rng).unwrap();
        let diag = ch.diagnostics();
        prop_assert!(diag.tp_residual < 1e-10);
        prop_assert!(diag.cp_min_eigenvalue > -1e-10);
        let choi = ch.choi();
        prop_assert!((choi.trace_re() - di as f64).abs() < 1e-10);

        let dil = kraus_to_stinespring(&ch, "E").unwrap();
        let v = dil.isometry();
        prop_assert!(max_abs(&(v.adjoint() * v - CMatrix::identity(di, di))) < 1e-10);
        let psi = random::pure_state::<f64, _>(reg1("A", di), &mut rng);
        let full = dil.apply_vector(&psi).unwrap();
        let via_dilation = DensityMatrix::pure(&full).unwrap().partial_trace(&["B"]).unwrap();
        let direct = ch.apply(&DensityMatrix::pure(&psi).unwrap()).unwrap();
        prop_assert!(max_abs(&(via_dilation.matrix() - direct.matrix())) < 1e-10);
    }

    #[test]
    fn composition_and_tensor_match_sequential_application(seed in any::<u64>()) {
        let mut rng = generator(seed);
        let f = random::channel::<f64, _>(reg1("A", 2), reg1("B", 3), 2, &mut rng).unwrap();
        let g = random::channel::<f64, _>(reg1("B", 3), reg1("C", 2), 2, &mut rng).unwrap();
        let rho = random::density::<f64, _>(reg1("A", 2), 2, &mut rng);
        let seq = g.apply(&f.apply(&rho).unwrap()).unwrap();
        let comp = f.then(&g).unwrap().apply(&rho).unwrap();
        prop_assert!(max_abs(&(seq.matrix() - comp.matrix())) < 1e-12);

        let h = random::channel::<f64, _>(reg1("X", 2), reg1("Y", 2), 2, &mut rng).unwrap();
        let sigma = random::density::<f64, _>(reg1("X", 2), 2, &mut rng);
        let par = f.tensor(&h).unwrap().apply(&rho.tensor(&sigma).unwrap()).unwrap();
        let sep = f.apply(&rho).unwrap().tensor(&h.apply(&sigma).unwrap()).unwrap();
        prop_assert!(max_abs(&(par.matrix() - sep.matrix())) < 1e-12);
    }

    #[test]
    fn purification_reproduces_the_state(seed in any::<u64>(), d in 1usize..5, rank in 1usize..5) {
        let mut rng = generator(seed);
        let rho = random::density::<f64, _>(reg1("A", d), rank.min(d), &mut rng);
        let phi = purify(&rho, "R").unwrap();
        prop_assert!((phi.vector().norm() - 1.0).abs() < 1e-12);
        prop_assert!(phi.reference().dim() <= rank.min(d));
        prop_assert!(max_abs(&(phi.marginal().matrix() - rho.matrix())) < 1e-12);
    }

    // Commuting states: the fidelity is the classical Bhattacharyya overlap.
    #[test]
    fn uhlmann_isometry_attains_classical_fidelity(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = generator(seed);
        let p = random::probabilities::<f64, _>(d, &mut rng);
        let q = random::probabilities::<f64, _>(d, &mut rng);
        let rho = DensityMatrix::diagonal(reg1("A", d), &p).unwrap();
        let sigma = DensityMatrix::diagonal(reg1("A", d), &q).unwrap();
        let bhattacharyya: f64 = p.iter().zip(&q).map(|(a, b)| (a * b).sqrt()).sum();
        prop_assert!((fidelity(&rho, &sigma).unwrap() - bhattacharyya).abs() < 1e-10);
        let phi = purify(&rho, "R").unwrap();
        let psi = purify(&sigma, "R").unwrap();
        let w = uhlmann_isometry(&phi, &psi).unwrap();
        let mapped = phi.map_reference(&w, psi.reference().clone()).unwrap();
        prop_assert!((overlap(psi.vector(), mapped.vector()).unwrap() - bhattacharyya).abs() < 1e-9);
    }
}

#[test]
fn classical_stochastic_moves_distributions() {
    let w = vec![vec![0.9, 0.2], vec![0.1, 0.8]];
    let ch = KrausChannel::<f64>::classical_stochastic(reg1("X", 2), reg1("Y", 2), &w).unwrap();
    let rho = DensityMatrix::diagonal(reg1("X", 2), &[0.25, 0.75]).unwrap();
    let out = ch.apply(&rho).unwrap();
    assert!((out.matrix()[(0, 0)].re - (0.9 * 0.25 + 0.2 * 0.75)).abs() < 1e-14);
    assert!((out.matrix()[(1, 1)].re - (0.1 * 0.25 + 0.8 * 0.75)).abs() < 1e-14);
    assert!(out.matrix()[(0, 1)].norm() < 1e-14);
}

#[test]
fn half_identity_is_rejected_with_its_residual() {
    let k = CMatrix::<f64>::identity(2, 2) * qadc::scalar::cre(0.5);
    let err = KrausChannel::new(reg1("A", 2), reg1("A", 2), vec![k]).unwrap_err();
    assert!(err.to_string().contains("trace-preservation residual 0.75"), "{}", err);
}

#[test]
fn trace_out_keeps_the_named_subsystem() {
    let r = Register::new([("S", 2), ("A", 2)]).unwrap();
    let ch = KrausChannel::<f64>::trace_out(r.clone(), &["A"]).unwrap();
    let mut rng = generator(5);
    let rho = random::density::<f64, _>(r, 4, &mut rng);
    let out = ch.apply(&rho).unwrap();
    assert!(max_abs(&(out.matrix() - rho.partial_trace(&["A"]).unwrap().matrix())) < 1e-12);
}

#[test]
fn replacement_channel_outputs_its_state() {
    let target = DensityMatrix::<f64>::basis(reg1("A", 3), 2).unwrap();
    let ch = KrausChannel::replacement(reg1("S0", 2), &target).unwrap();
    let out = ch.apply(&DensityMatrix::maximally_mixed(reg1("S0", 2))).unwrap();
    assert!(max_abs(&(out.matrix() - target.matrix())) < 1e-12);
}

#[test]
fn choi_of_the_qubit_identity_is_a_scaled_bell_projector() {
    let ch = KrausChannel::<f64>::identity(reg1("A", 2));
    let ev = eigenvalues(&ch.choi()).unwrap();
    assert!((ev[0] - 2.0).abs() < 1e-12);
    assert!(ev[1..].iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn uhlmann_rejects_a_smaller_target_reference() {
    let mut rng = generator(9);
    let rho = random::full_rank_density::<f64, _>(reg1("A", 3), &mut rng);
    let phi = purify(&rho, "R").unwrap();
    let v = LabeledVector::basis(Register::new([("A", 3), ("R", 1)]).unwrap(), 0).unwrap();
    let psi = qadc::channels::Purification::new(v, &["R"]).unwrap();
    assert!(uhlmann_isometry(&phi, &psi).is_err());
}
