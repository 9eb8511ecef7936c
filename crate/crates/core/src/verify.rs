//! Randomized verification suites for the operator inequalities and
//! identities the coding scheme relies on. Each suite reports the worst
//! observed value of every check next to its tolerance.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::channels::{build_purified_encoding, overlap, purify, uhlmann_isometry, KrausChannel};
use crate::divergences::{fidelity, relative_entropy, sandwiched_renyi};
use crate::error::{Error, Result};
use crate::linalg::{
    commutator_norm, min_eigenvalue, pinch, spectral_decompose, DensityMatrix, LabeledOperator, Register,
};
use crate::names::{A, B, G, S, S0};
use crate::oneshot::{
    decision_region, decoder_from_region, evaluate_error, hayashi_nagaoka_check, lemma1_check, lemma2_check,
    sample_codebook, CodeParams, CqEnsemble, EncoderMode,
};
use crate::random;
use crate::rate::{assemble, classical_quantum, ActionModel, Strategy};
use crate::rng::derived;
use crate::scalar::{cre, max_abs, CMatrix, Real};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    /// Worst observed value.
    pub worst: f64,
    pub tolerance: f64,
    /// `"max"` when values must stay at or below the tolerance, `"min"` when
    /// they must stay at or above it.
    pub kind: &'static str,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub cases: usize,
    pub pass: bool,
    pub checks: BTreeMap<String, Check>,
}

struct Tracker {
    checks: BTreeMap<String, Check>,
}

impl Tracker {
    fn new() -> Self {
        Tracker { checks: BTreeMap::new() }
    }

    /// Records `value <= tol`.
    fn at_most(&mut self, name: &str, value: f64, tol: f64) {
        let c = self.checks.entry(name.to_string()).or_insert(Check {
            worst: f64::NEG_INFINITY,
            tolerance: tol,
            kind: "max",
            failures: 0,
        });
        c.worst = c.worst.max(value);
        if !(value <= tol) {
            c.failures += 1;
        }
    }

    /// Records `value >= tol`.
    fn at_least(&mut self, name: &str, value: f64, tol: f64) {
        let c = self.checks.entry(name.to_string()).or_insert(Check {
            worst: f64::INFINITY,
            tolerance: tol,
            kind: "min",
            failures: 0,
        });
        c.worst = c.worst.min(value);
        if !(value >= tol) {
            c.failures += 1;
        }
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.at_most(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn finish(self, name: &str, seed: u64, cases: usize) -> SuiteReport {
        let pass = self.checks.values().all(|c| c.failures == 0);
        SuiteReport { name: name.to_string(), seed, cases, pass, checks: self.checks }
    }
}

fn reg(d: usize) -> Register {
    Register::single("X", d).unwrap()
}

/// Hermitian matrix whose spectrum is either generic or drawn from a small
/// set of values, so that degenerate eigenspaces are exercised.
pub fn random_hermitian_with_degeneracy<R: Rng>(d: usize, degenerate: bool, rng: &mut R) -> LabeledOperator<f64> {
    if !degenerate {
        return random::hermitian(reg(d), rng);
    }
    let u = random::unitary::<f64, R>(d, rng);
    let levels = [-1.0, 0.5, 2.0];
    let diag: Vec<f64> = (0..d).map(|_| levels[rng.random_range(0..levels.len())]).collect();
    let dm = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, diag.iter().map(|&x| cre(x))));
    LabeledOperator::new(reg(d), &u * dm * u.adjoint()).unwrap().hermitian_part()
}

fn unit_trace(op: LabeledOperator<f64>) -> LabeledOperator<f64> {
    let t = op.trace_re();
    op.scale(1.0 / t)
}

/// Pinching inequality, commutation, idempotence and self-adjointness.
pub fn pinching_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut tr = Tracker::new();
    for i in 0..cases {
        let mut rng = derived(seed, i as u64);
        let d = rng.random_range(2..=8);
        let a = random_hermitian_with_degeneracy(d, i % 2 == 1, &mut rng);
        let b = unit_trace(random::psd(reg(d), rng.random_range(1..=d), &mut rng));
        let c = random::hermitian::<f64, _>(reg(d), &mut rng);
        let pb = pinch(&a, &b)?;
        let nu = spectral_decompose(&a, f64::cluster_tol())?.len() as f64;
        tr.at_least("pinching_inequality_min_eig", min_eigenvalue(&pb.scale(nu).sub(&b)?.hermitian_part())?, -1e-8);
        tr.at_most("commutator_max_abs", commutator_norm(&a, &pb)?, 1e-8);
        tr.at_most("idempotence", max_abs(&(pinch(&a, &pb)?.matrix() - pb.matrix())), 1e-10);
        let lhs = pb.trace_product(&c)?;
        let rhs = b.trace_product(&pinch(&a, &c)?)?;
        tr.at_most("self_adjointness", (lhs - rhs).norm(), 1e-10);
        tr.at_most("trace_preservation", (pb.trace_re() - b.trace_re()).abs(), 1e-10);
    }
    Ok(tr.finish("pinching", seed, cases))
}

fn scalar_renyi(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| a.powf(alpha) * b.powf(1.0 - alpha)).sum();
    s.log2() / (alpha - 1.0)
}

fn finite(d: crate::divergences::Divergence<f64>) -> f64 {
    d.as_f64()
}

/// Fidelity relation, monotonicity in the order, additivity, the commuting
/// case and convergence to the relative entropy.
pub fn divergence_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut tr = Tracker::new();
    let grid = [0.3, 0.5, 0.8, 1.2, 2.0, 3.0];
    for i in 0..cases {
        let mut rng = derived(seed, i as u64);
        let d = rng.random_range(2..=3);
        let rho = random::full_rank_density::<f64, _>(reg(d), &mut rng);
        let sigma = random::full_rank_density::<f64, _>(reg(d), &mut rng);

        let half = finite(sandwiched_renyi(&rho, &sigma, 0.5)?);
        let f = fidelity(&rho, &sigma)?;
        tr.at_most("half_order_vs_fidelity", (half + 2.0 * f.log2()).abs(), 1e-8);

        let values: Vec<f64> =
            grid.iter().map(|&a| Ok(finite(sandwiched_renyi(&rho, &sigma, a)?))).collect::<Result<_>>()?;
        let drop = values.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
        tr.at_most("monotonicity_violation", drop, 1e-9);

        let rr = rho.tensor(&rho.renamed("X", "Y")?)?;
        let ss = sigma.tensor(&sigma.renamed("X", "Y")?)?;
        for &a in &[0.5, 2.0] {
            let one = finite(sandwiched_renyi(&rho, &sigma, a)?);
            let two = finite(sandwiched_renyi(&rr, &ss, a)?);
            tr.at_most("additivity", (two - 2.0 * one).abs(), 1e-8);
        }

        let p = random::probabilities::<f64, _>(d, &mut rng);
        let q = random::probabilities::<f64, _>(d, &mut rng);
        let dp = DensityMatrix::diagonal(reg(d), &p)?;
        let dq = DensityMatrix::diagonal(reg(d), &q)?;
        for &a in &[0.5, 2.0] {
            let got = finite(sandwiched_renyi(&dp, &dq, a)?);
            tr.at_most("commuting_case", (got - scalar_renyi(&p, &q, a)).abs(), 1e-9);
        }

        let rel = finite(relative_entropy(&rho, &sigma)?);
        for &a in &[1.001, 0.999] {
            let got = finite(sandwiched_renyi(&rho, &sigma, a)?);
            tr.at_most("order_limit", (got - rel).abs(), 1e-2);
        }
    }
    Ok(tr.finish("divergences", seed, cases))
}

/// `I - (S+T)^{-1/2} S (S+T)^{-1/2} <= 2(I - S) + 4T` on random inputs.
pub fn hayashi_nagaoka_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut tr = Tracker::new();
    for i in 0..cases {
        let mut rng = derived(seed, i as u64);
        let d = rng.random_range(2..=8);
        let u = random::unitary::<f64, _>(d, &mut rng);
        let diag: Vec<f64> = (0..d)
            .map(|_| match rng.random_range(0..4) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random::<f64>(),
            })
            .collect();
        let dm = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, diag.iter().map(|&x| cre(x))));
        let s = LabeledOperator::new(reg(d), &u * dm * u.adjoint())?.hermitian_part();
        let scale = rng.random::<f64>() * 2.0;
        let t = random::psd(reg(d), rng.random_range(1..=d), &mut rng);
        let t = unit_trace(t).scale(scale);
        let out = hayashi_nagaoka_check(&s, &t)?;
        tr.at_least("min_eig_slack", out.min_eig_slack, -1e-8);
    }
    Ok(tr.finish("hayashi_nagaoka", seed, cases))
}

/// Random classical-quantum state on `V U B`.
pub fn random_cq_vub<R: Rng>(nv: usize, nu: usize, db: usize, rng: &mut R) -> Result<DensityMatrix<f64>> {
    let flat = random::probabilities::<f64, R>(nv * nu, rng);
    let p: Vec<Vec<f64>> = (0..nv).map(|v| flat[v * nu..(v + 1) * nu].to_vec()).collect();
    let breg = Register::single(B, db)?;
    let states: Vec<Vec<DensityMatrix<f64>>> = (0..nv)
        .map(|_| (0..nu).map(|_| random::density(breg.clone(), rng.random_range(1..=db), rng)).collect())
        .collect();
    let refs: Vec<Vec<&DensityMatrix<f64>>> = states.iter().map(|r| r.iter().collect()).collect();
    classical_quantum(&p, &refs)
}

/// Both projector inequalities on random classical-quantum states.
pub fn lemma2_suite(seed: u64, bundles: usize) -> Result<SuiteReport> {
    let mut tr = Tracker::new();
    let mut cases = 0;
    for i in 0..bundles {
        let mut rng = derived(seed, i as u64);
        let (nv, nu, db) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(2..=3));
        let rho = random_cq_vub(nv, nu, db, &mut rng)?;
        for &alpha in &[0.1, 0.25, 0.4] {
            for &rsum in &[1.0, 2.0, 3.0] {
                let out = lemma2_check(&rho, rsum, alpha)?;
                tr.at_most("lhs1_over_rhs", out.lhs1 / out.rhs, 1.0 + crate::oneshot::LEMMA2_RELATIVE_SLACK);
                tr.at_most("lhs2_over_rhs", out.lhs2 / out.rhs, 1.0 + crate::oneshot::LEMMA2_RELATIVE_SLACK);
                tr.flag("pass", out.pass);
                cases += 1;
            }
        }
    }
    Ok(tr.finish("lemma2", seed, cases))
}

/// Subcodebook divergence bound on random qubit ensembles, plus the
/// empirical decrease of the mean with the subcodebook size.
pub fn lemma1_suite(seed: u64, ensembles: usize, trials: usize) -> Result<SuiteReport> {
    let mut tr = Tracker::new();
    let mut cases = 0;
    for i in 0..ensembles {
        let mut rng = derived(seed, i as u64);
        let ens = CqEnsemble::<f64>::random(2, 2, Register::single(S, 2)?, &mut rng)?;
        for (k, &alpha) in [0.1, 0.25].iter().enumerate() {
            let mut prev = f64::INFINITY;
            for (j, &l) in [2usize, 4, 8].iter().enumerate() {
                let s = crate::rng::mix_seed(seed, (i * 16 + k * 4 + j) as u64);
                let out = lemma1_check(&ens, None, l, alpha, trials, s)?;
                tr.at_most("mean_minus_bound_minus_3se", out.empirical_mean - out.bound - 3.0 * out.stderr, 0.0);
                tr.at_most("mean_increase_with_l", out.empirical_mean - prev, 0.0);
                prev = out.empirical_mean;
                cases += 1;
            }
        }
    }
    Ok(tr.finish("lemma1", seed, cases))
}

/// Random model with qubit `G S S0 A B` and two-element Kraus families.
pub fn random_qubit_model<R: Rng>(rng: &mut R) -> Result<ActionModel<f64>> {
    let q = |n: &str| Register::single(n, 2).unwrap();
    let action = random::channel(q(G), Register::new([(S, 2), (S0, 2)])?, 2, rng)?;
    let comm = random::channel(Register::new([(S, 2), (A, 2)])?, q(B), 2, rng)?;
    ActionModel::new(action, comm)
}

/// Random strategy with `|V| = |U| = 2` for a qubit model.
pub fn random_qubit_strategy<R: Rng>(rng: &mut R) -> Result<Strategy<f64>> {
    let flat = random::probabilities::<f64, R>(4, rng);
    let p = vec![flat[..2].to_vec(), flat[2..].to_vec()];
    let g = Register::single(G, 2)?;
    let states = (0..2).map(|_| random::density(g.clone(), 2, rng)).collect();
    let encoders = (0..2)
        .map(|_| random::channel(Register::single(S0, 2)?, Register::single(A, 2)?, 2, rng))
        .collect::<Result<Vec<KrausChannel<f64>>>>()?;
    Strategy::new(p, states, encoders)
}

/// Uhlmann fidelity, the encoder distance identity, and the gap between
/// the two encoder modes.
pub fn uhlmann_suite(seed: u64, pairs: usize, encodings: usize, instances: usize) -> Result<SuiteReport> {
    let mut tr = Tracker::new();
    for i in 0..pairs {
        let mut rng = derived(seed, i as u64);
        let d = rng.random_range(2..=4);
        let rho = random::density::<f64, _>(reg(d), rng.random_range(1..=d), &mut rng);
        let sigma = random::density::<f64, _>(reg(d), rng.random_range(1..=d), &mut rng);
        let phi = purify(&rho, "R")?;
        let base = purify(&sigma, "R2")?;
        let dr = rng.random_range(base.reference().dim().max(phi.reference().dim())..=4);
        let iso = random::isometry::<f64, _>(dr, base.reference().dim(), &mut rng);
        let psi = base.map_reference(&iso, Register::single("R2", dr)?)?;
        let w = uhlmann_isometry(&phi, &psi)?;
        let mapped = phi.map_reference(&w, psi.reference().clone())?;
        let achieved = overlap(psi.vector(), mapped.vector())?;
        tr.at_most("uhlmann_fidelity_error", (achieved - fidelity(&rho, &sigma)?).abs(), 1e-8);
        let dw = w.ncols();
        tr.at_most("uhlmann_isometry_residual", max_abs(&(w.adjoint() * &w - CMatrix::identity(dw, dw))), 1e-9);
    }
    for i in 0..encodings {
        let mut rng = derived(seed ^ 0x5555, i as u64);
        let dg = rng.random_range(1..=3);
        let ds = rng.random_range(1..=3);
        let ds0 = rng.random_range(1..=3);
        let da = rng.random_range(1..=3);
        let l = [1usize, 2, 4][rng.random_range(0..3)];
        let action = random::channel::<f64, _>(
            Register::single(G, dg)?,
            Register::new([(S, ds), (S0, ds0)])?,
            rng.random_range(1..=2),
            &mut rng,
        )?;
        let sigma = random::density(Register::single(G, dg)?, rng.random_range(1..=dg), &mut rng);
        let encs = (0..l)
            .map(|_| {
                random::channel(Register::single(S0, ds0)?, Register::single(A, da)?, rng.random_range(1..=3), &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&KrausChannel<f64>> = encs.iter().collect();
        let enc = build_purified_encoding(&action, &sigma, &refs)?;
        let gap = (enc.encoded_distance()? - enc.marginal_distance()?).abs();
        tr.at_most("encoder_distance_identity", gap, 1e-7);
    }
    for i in 0..instances {
        let mut rng = derived(seed ^ 0xAAAA, i as u64);
        let model = random_qubit_model(&mut rng)?;
        let strategy = random_qubit_strategy(&mut rng)?;
        let bundle = assemble(&model, &strategy)?;
        let params = CodeParams::new(2, 2)?;
        let region = decision_region(&bundle.rho_vub, params.rate_sum())?;
        let cb = sample_codebook(strategy.p_vu(), params, rng.random())?;
        let dec = decoder_from_region(&region, &cb)?;
        let ideal = evaluate_error(&model, &strategy, &bundle, &cb, &dec, EncoderMode::IdealAverage)?;
        let exact = evaluate_error(&model, &strategy, &bundle, &cb, &dec, EncoderMode::ExactUhlmann)?;
        let allowed = 2.0 * ideal.purified_distance_term + 1e-6;
        tr.at_most("mode_gap_minus_allowance", (ideal.avg_error - exact.avg_error).abs() - allowed, 0.0);
    }
    Ok(tr.finish("uhlmann", seed, pairs + encodings + instances))
}

/// Named groups accepted by [`run_suite`].
pub const SUITES: &[&str] =
    &["lemmas", "pinching", "divergences", "hayashi_nagaoka", "lemma1", "lemma2", "uhlmann", "all"];

/// Runs a suite or group at its standard size.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    let one = |n: &str| -> Result<SuiteReport> {
        match n {
            "pinching" => pinching_suite(seed, 200),
            "divergences" => divergence_suite(seed, 100),
            "hayashi_nagaoka" => hayashi_nagaoka_suite(seed, 500),
            "lemma1" => lemma1_suite(seed, 10, 500),
            "lemma2" => lemma2_suite(seed, 50),
            "uhlmann" => uhlmann_suite(seed, 100, 20, 10),
            _ => Err(Error::BadCodeParams(format!("unknown suite `{}`", n))),
        }
    };
    let names: Vec<&str> = match name {
        "lemmas" => vec!["lemma1", "lemma2", "hayashi_nagaoka", "pinching"],
        "all" => vec!["pinching", "divergences", "hayashi_nagaoka", "lemma1", "lemma2", "uhlmann"],
        other => vec![other],
    };
    names.into_iter().map(one).collect()
}
