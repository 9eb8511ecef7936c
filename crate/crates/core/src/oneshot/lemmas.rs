use rand::Rng;
use serde::Serialize;

use crate::divergences::sandwiched_renyi;
use crate::error::{Error, Result};
use crate::io::serialize_extended_f64;
use crate::linalg::{
    distinct_eigenvalue_count, eigenvalues, matrix_function, min_eigenvalue, DensityMatrix, LabeledOperator, Register,
};
use crate::random::{full_rank_density, probabilities};
use crate::rate::{classical_quantum, JointStateBundle};
use crate::rng::generator;
use crate::scalar::Real;

use super::decision_region;
use super::simulate::mean_and_stderr;

/// Classical-quantum ensemble `{p(v,u), rho^{v,u}}` with conditional
/// averages `sigma^u = sum_v p(v|u) rho^{v,u}`.
#[derive(Clone, Debug)]
pub struct CqEnsemble<T: Real> {
    pub p_vu: Vec<Vec<T>>,
    /// Indexed `[v][u]`.
    pub states: Vec<Vec<DensityMatrix<T>>>,
    pub sigma: Vec<DensityMatrix<T>>,
}

impl<T: Real> CqEnsemble<T> {
    pub fn new(p_vu: Vec<Vec<T>>, states: Vec<Vec<DensityMatrix<T>>>) -> Result<Self> {
        let nv = p_vu.len();
        let nu = p_vu.first().map(Vec::len).unwrap_or(0);
        if nv == 0 || nu == 0 || states.len() != nv || states.iter().any(|r| r.len() != nu) {
            return Err(Error::BadDistribution("ensemble shape does not match p_vu".into()));
        }
        let mut sigma = Vec::with_capacity(nu);
        for u in 0..nu {
            let pu = p_vu.iter().fold(T::zero(), |a, r| a + r[u]);
            let w: Vec<T> = if pu > T::zero() {
                p_vu.iter().map(|r| r[u] / pu).collect()
            } else {
                vec![T::one() / T::of(nv as f64); nv]
            };
            let col: Vec<&DensityMatrix<T>> = states.iter().map(|r| &r[u]).collect();
            sigma.push(DensityMatrix::mixture(&w, &col)?);
        }
        Ok(CqEnsemble { p_vu, states, sigma })
    }

    /// The `S` ensemble of a joint-state bundle.
    pub fn from_bundle(bundle: &JointStateBundle<T>) -> Result<Self> {
        CqEnsemble::new(bundle.p_vu.clone(), bundle.rho_s.clone())
    }

    /// Random ensemble with full-rank states on `register`.
    pub fn random<R: Rng>(nv: usize, nu: usize, register: Register, rng: &mut R) -> Result<Self> {
        let flat = probabilities::<T, R>(nv * nu, rng);
        let p_vu = (0..nv).map(|v| flat[v * nu..(v + 1) * nu].to_vec()).collect();
        let states = (0..nv).map(|_| (0..nu).map(|_| full_rank_density(register.clone(), rng)).collect()).collect();
        CqEnsemble::new(p_vu, states)
    }

    pub fn nv(&self) -> usize {
        self.p_vu.len()
    }

    pub fn nu(&self) -> usize {
        self.p_vu[0].len()
    }

    pub fn p_u(&self) -> Vec<T> {
        (0..self.nu()).map(|u| self.p_vu.iter().fold(T::zero(), |a, r| a + r[u])).collect()
    }

    pub fn p_v_given_u(&self, u: usize) -> Vec<T> {
        let pu = self.p_u()[u];
        self.p_vu.iter().map(|r| if pu > T::zero() { r[u] / pu } else { T::one() / T::of(self.nv() as f64) }).collect()
    }

    /// `sum p(v,u) |v u><v u| ⊗ rho^{v,u}`.
    pub fn joint(&self) -> Result<DensityMatrix<T>> {
        let refs: Vec<Vec<&DensityMatrix<T>>> = self.states.iter().map(|r| r.iter().collect()).collect();
        classical_quantum(&self.p_vu, &refs)
    }

    /// `sum p(v,u) |v u><v u| ⊗ sigma^u`.
    pub fn markov(&self) -> Result<DensityMatrix<T>> {
        let refs: Vec<Vec<&DensityMatrix<T>>> = (0..self.nv()).map(|_| self.sigma.iter().collect()).collect();
        classical_quantum(&self.p_vu, &refs)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::BadOrder(alpha));
    }
    Ok(())
}

fn categorical<T: Real, R: Rng>(p: &[T], rng: &mut R) -> usize {
    let x: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, q) in p.iter().enumerate() {
        let q = q.as_f64();
        if q <= 0.0 {
            continue;
        }
        acc += q;
        last = i;
        if x < acc {
            return i;
        }
    }
    last
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Outcome {
    pub l: usize,
    pub alpha: f64,
    pub u_index: Option<usize>,
    pub trials: usize,
    pub empirical_mean: f64,
    pub stderr: f64,
    #[serde(serialize_with = "serialize_extended_f64")]
    pub bound: f64,
    pub pass: bool,
}

/// Samples subcodebooks `v(1..L)` and compares the mean of
/// `D~_{1+a}(tau || sigma^u)`, `tau = (1/L) sum_l rho^{v(l),u}`, with its
/// analytic bound.
///
/// With `u_index = Some(u)` the action value is fixed and the bound uses
/// `sum_v p(v|u) 2^{a D~_{1+a}(rho^{v,u} || sigma^u)}`; with `None`, `u` is drawn
/// from `p_U` on every trial and the bound uses
/// `2^{a D~_{1+a}(rho_VUS || rho_{V-U-S})}`.
pub fn lemma1_check<T: Real>(
    ens: &CqEnsemble<T>,
    u_index: Option<usize>,
    l: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<Lemma1Outcome> {
    check_alpha(alpha)?;
    if l == 0 || trials == 0 {
        return Err(Error::BadCodeParams("subcodebook size and trial count must be positive".into()));
    }
    if let Some(u) = u_index {
        if u >= ens.nu() {
            return Err(Error::BadCodeParams(format!("u = {} outside alphabet of size {}", u, ens.nu())));
        }
    }
    let a = T::of(alpha);
    let order = T::one() + a;
    let rs = (l as f64).log2();
    let p_u = ens.p_u();
    let in_support: Vec<usize> = (0..ens.nu()).filter(|&u| p_u[u] > T::support_tol()).collect();
    let nu2_of = |u: usize| distinct_eigenvalue_count(ens.sigma[u].op(), T::cluster_tol()).map(|n| n as f64);
    let prefactor = |nu2: f64| nu2.powf(alpha) * (-alpha * rs).exp2() / (alpha * std::f64::consts::LN_2);
    let bound = match u_index {
        Some(u) => {
            let pv = ens.p_v_given_u(u);
            let mut q = 0.0;
            for (v, row) in ens.states.iter().enumerate() {
                if pv[v] > T::zero() {
                    let d = sandwiched_renyi(&row[u], &ens.sigma[u], order)?.as_f64();
                    q += pv[v].as_f64() * (alpha * d).exp2();
                }
            }
            prefactor(nu2_of(u)?) * q
        }
        None => {
            let mut nu2 = 0.0f64;
            for &u in &in_support {
                nu2 = nu2.max(nu2_of(u)?);
            }
            let d = sandwiched_renyi(&ens.joint()?, &ens.markov()?, order)?.as_f64();
            prefactor(nu2) * (alpha * d).exp2()
        }
    };
    let mut rng = generator(seed);
    let conditionals: Vec<Vec<T>> = (0..ens.nu()).map(|u| ens.p_v_given_u(u)).collect();
    let w = vec![T::one() / T::of(l as f64); l];
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let u = match u_index {
            Some(u) => u,
            None => categorical(&p_u, &mut rng),
        };
        let states: Vec<&DensityMatrix<T>> =
            (0..l).map(|_| &ens.states[categorical(&conditionals[u], &mut rng)][u]).collect();
        let tau = DensityMatrix::mixture(&w, &states)?;
        samples.push(sandwiched_renyi(&tau, &ens.sigma[u], order)?.as_f64());
    }
    let (mean, stderr) = mean_and_stderr(&samples);
    Ok(Lemma1Outcome {
        l,
        alpha,
        u_index,
        trials,
        empirical_mean: mean,
        stderr,
        bound,
        pass: mean <= bound + 3.0 * stderr,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma2Outcome {
    pub alpha: f64,
    pub rate_sum: f64,
    /// `Tr[(I - Pi) rho_VUB]`.
    pub lhs1: f64,
    /// `2^{R+R_S} Tr[Pi (rho_VU ⊗ rho_B)]`.
    pub lhs2: f64,
    /// `nu1^a 2^{a(R + R_S - D~_{1-a}(rho_VUB || rho_VU ⊗ rho_B))}`.
    pub rhs: f64,
    pub nu1: usize,
    pub pass: bool,
}

/// Relative slack allowed in the projector inequalities.
pub const LEMMA2_RELATIVE_SLACK: f64 = 1e-9;

/// Evaluates both projector inequalities for a state on `V U B`.
pub fn lemma2_check<T: Real>(rho_vub: &DensityMatrix<T>, rate_sum: f64, alpha: f64) -> Result<Lemma2Outcome> {
    check_alpha(alpha)?;
    if !(rate_sum > 0.0) {
        return Err(Error::BadCodeParams(format!("rate sum {} must be positive", rate_sum)));
    }
    let region = decision_region(rho_vub, rate_sum)?;
    let id = LabeledOperator::identity(rho_vub.register().clone());
    let lhs1 = id.sub(&region.pi_vub)?.trace_product(rho_vub.op())?.re.as_f64();
    let lhs2 = rate_sum.exp2() * region.pi_vub.trace_product(region.product.op())?.re.as_f64();
    let d = sandwiched_renyi(rho_vub, &region.product, T::one() - T::of(alpha))?.as_f64();
    let rhs = (region.nu1 as f64).powf(alpha) * (alpha * (rate_sum - d)).exp2();
    let limit = rhs * (1.0 + LEMMA2_RELATIVE_SLACK);
    Ok(Lemma2Outcome { alpha, rate_sum, lhs1, lhs2, rhs, nu1: region.nu1, pass: lhs1 <= limit && lhs2 <= limit })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HayashiNagaokaOutcome {
    /// Smallest eigenvalue of `2(I - S) + 4T - [I - (S+T)^{-1/2} S (S+T)^{-1/2}]`.
    pub min_eig_slack: f64,
    pub pass: bool,
}

/// Tolerance on the operator ranges of the inputs.
pub const HN_RANGE_TOL: f64 = 1e-9;
/// Largest negative slack accepted as numerical noise.
pub const HN_SLACK_TOL: f64 = 1e-8;

pub fn hayashi_nagaoka_check<T: Real>(s: &LabeledOperator<T>, t: &LabeledOperator<T>) -> Result<HayashiNagaokaOutcome> {
    if s.register() != t.register() {
        return Err(Error::RegisterMismatch(format!("{} vs {}", s.register(), t.register())));
    }
    let tol = T::of(HN_RANGE_TOL);
    let es = eigenvalues(s).map_err(|e| Error::BadOperatorRange(e.to_string()))?;
    if es.last().copied().unwrap_or(T::zero()) < -tol || es.first().copied().unwrap_or(T::zero()) > T::one() + tol {
        return Err(Error::BadOperatorRange("S must satisfy 0 <= S <= I".into()));
    }
    if min_eigenvalue(t).map_err(|e| Error::BadOperatorRange(e.to_string()))? < -tol {
        return Err(Error::BadOperatorRange("T must be positive semidefinite".into()));
    }
    let id = LabeledOperator::identity(s.register().clone());
    let sum = s.add(t)?.hermitian_part();
    let inv_sqrt = matrix_function(&sum, |x| T::one() / x.sqrt(), true)?;
    let lhs = id.sub(&inv_sqrt.mul(s)?.mul(&inv_sqrt)?)?;
    let rhs = id.sub(s)?.scale(T::of(2.0)).add(&t.scale(T::of(4.0)))?;
    let slack = min_eigenvalue(&rhs.sub(&lhs)?.hermitian_part())?.as_f64();
    Ok(HayashiNagaokaOutcome { min_eig_slack: slack, pass: slack >= -HN_SLACK_TOL })
}
