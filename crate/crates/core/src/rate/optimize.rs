use rand::Rng;
use rayon::prelude::*;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, LabeledOperator, Register};
use crate::names::{A, G, S0};
use crate::random::{gaussian_vector, ginibre, isometry, probabilities};
use crate::rng::derived;
use crate::scalar::{cre, CMatrix, CVector, Real};

use super::{achievable_rate, assemble, ActionModel, RateReport, Strategy};

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Sweeps per restart; each sweep updates every parameter block once.
    pub sweeps: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default. Does not affect results.
    pub workers: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 16, sweeps: 200, seed: 0, workers: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizationResult<T: Real> {
    pub strategy: Strategy<T>,
    pub report: RateReport<T>,
    /// Index of the restart that produced the best strategy.
    pub best_restart: usize,
    /// Final rate of each restart.
    pub restart_rates: Vec<T>,
    /// Best rate over all restarts after each sweep (entry 0 is the
    /// initial candidates).
    pub trace: Vec<T>,
}

/// Point in parameter space.
#[derive(Clone)]
struct Params<T: Real> {
    p: Vec<T>,
    /// Unit vectors on `G ⊗ K`, one per `u`.
    states: Vec<CVector<T>>,
    /// Isometries `S0 -> A ⊗ E`, one per `v`.
    encoders: Vec<CMatrix<T>>,
}

struct Problem<'a, T: Real> {
    model: &'a ActionModel<T>,
    nv: usize,
    nu: usize,
    dg: usize,
    ds0: usize,
    da: usize,
    de: usize,
}

impl<'a, T: Real> Problem<'a, T> {
    fn strategy(&self, x: &Params<T>) -> Result<Strategy<T>> {
        let p_vu = (0..self.nv).map(|v| (0..self.nu).map(|u| x.p[v * self.nu + u]).collect()).collect();
        let g = Register::single(G, self.dg)?;
        let states = x
            .states
            .iter()
            .map(|psi| {
                let c = CMatrix::from_fn(self.dg, self.dg, |i, k| psi[i * self.dg + k]);
                let op = LabeledOperator::new(g.clone(), &c * c.adjoint())?.hermitian_part();
                DensityMatrix::new(op)
            })
            .collect::<Result<Vec<_>>>()?;
        let (s0, a) = (Register::single(S0, self.ds0)?, Register::single(A, self.da)?);
        let encoders = x
            .encoders
            .iter()
            .map(|w| {
                let kraus =
                    (0..self.de).map(|j| CMatrix::from_fn(self.da, self.ds0, |o, i| w[(o * self.de + j, i)])).collect();
                KrausChannel::new(s0.clone(), a.clone(), kraus)
            })
            .collect::<Result<Vec<_>>>()?;
        Strategy::new(p_vu, states, encoders)
    }

    fn value(&self, x: &Params<T>) -> Result<T> {
        let s = self.strategy(x)?;
        Ok(achievable_rate(&assemble(self.model, &s)?)?.r_low)
    }

    fn random_point<R: Rng>(&self, rng: &mut R) -> Params<T> {
        Params {
            p: probabilities(self.nv * self.nu, rng),
            states: (0..self.nu).map(|_| unit(gaussian_vector(self.dg * self.dg, rng))).collect(),
            encoders: (0..self.nv).map(|_| isometry(self.da * self.de, self.ds0, rng)).collect(),
        }
    }
}

fn unit<T: Real>(v: CVector<T>) -> CVector<T> {
    let n = v.norm();
    v / cre(n)
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex<T: Real>(y: &[T]) -> Vec<T> {
    let mut s: Vec<T> = y.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = T::zero();
    let mut theta = T::zero();
    for (i, &si) in s.iter().enumerate() {
        cum += si;
        let t = (cum - T::one()) / T::of((i + 1) as f64);
        if si - t > T::zero() {
            theta = t;
        }
    }
    let mut x: Vec<T> = y.iter().map(|&v| (v - theta).max(T::zero())).collect();
    let total = x.iter().fold(T::zero(), |a, &b| a + b);
    for v in &mut x {
        *v /= total;
    }
    x
}

/// Orthonormalizes the columns via the polar factor.
fn polar<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let svd = m.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

struct Steps<T> {
    p: T,
    states: T,
    encoders: T,
}

fn adapt<T: Real>(step: &mut T, improved: bool) {
    *step = if improved { (*step * T::of(1.5)).min(T::one()) } else { (*step * T::of(0.6)).max(T::of(1e-4)) };
}

type Restart<T> = (Params<T>, T, Vec<T>);

/// One restart of the alternating derivative-free search. Returns the best
/// point, its value, and the value after each sweep.
fn run_restart<T: Real, R: Rng>(prob: &Problem<T>, sweeps: usize, rng: &mut R) -> Result<Restart<T>> {
    let mut x = prob.random_point(rng);
    let mut fx = prob.value(&x)?;
    let mut trace = vec![fx];
    let mut steps = Steps { p: T::of(0.2), states: T::of(0.5), encoders: T::of(0.5) };
    let n = x.p.len();
    for _ in 0..sweeps {
        // pattern search on the simplex
        if n > 1 {
            let mut improved = false;
            for i in 0..n {
                for sign in [T::one(), -T::one()] {
                    let mut y = x.p.clone();
                    y[i] += sign * steps.p;
                    let cand = Params { p: project_to_simplex(&y), ..x.clone() };
                    let fc = prob.value(&cand)?;
                    if fc > fx {
                        x = cand;
                        fx = fc;
                        improved = true;
                    }
                }
            }
            adapt(&mut steps.p, improved);
        }
        // action states along random directions
        let mut improved = false;
        for u in 0..prob.nu {
            let dir = unit(gaussian_vector::<T, R>(prob.dg * prob.dg, rng));
            for sign in [T::one(), -T::one()] {
                let mut cand = x.clone();
                cand.states[u] = unit(&x.states[u] + &dir * cre(sign * steps.states));
                let fc = prob.value(&cand)?;
                if fc > fx {
                    x = cand;
                    fx = fc;
                    improved = true;
                    break;
                }
            }
        }
        adapt(&mut steps.states, improved);
        // encoder isometries
        let mut improved = false;
        for v in 0..prob.nv {
            let dir = ginibre::<T, R>(prob.da * prob.de, prob.ds0, rng);
            for sign in [T::one(), -T::one()] {
                let mut cand = x.clone();
                cand.encoders[v] = polar(&(&x.encoders[v] + &dir * cre(sign * steps.encoders)));
                let fc = prob.value(&cand)?;
                if fc > fx {
                    x = cand;
                    fx = fc;
                    improved = true;
                    break;
                }
            }
        }
        adapt(&mut steps.encoders, improved);
        trace.push(fx);
    }
    Ok((x, fx, trace))
}

/// Searches for a strategy with large `r_low` using `nv x nu` auxiliary
/// values. Restarts are independent, seeded by `(seed, restart index)`, and
/// the best is chosen by value with ties going to the lowest index.
pub fn optimize_rate<T: Real>(
    model: &ActionModel<T>,
    nv: usize,
    nu: usize,
    config: &OptimizerConfig,
) -> Result<OptimizationResult<T>> {
    if nv == 0 || nu == 0 {
        return Err(Error::RegisterMismatch("auxiliary dimensions must be at least 1".into()));
    }
    if config.restarts == 0 {
        return Err(Error::BadCodeParams("at least one restart is required".into()));
    }
    let (ds0, da) = (model.dim(S0), model.dim(A));
    let prob = Problem { model, nv, nu, dg: model.dim(G), ds0, da, de: ds0 * da };
    let work = |r: usize| {
        let mut rng = derived(config.seed, r as u64);
        run_restart(&prob, config.sweeps, &mut rng)
    };
    let runs: Vec<Result<Restart<T>>> = if config.workers == 1 {
        (0..config.restarts).map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Numerical(e.to_string()))?;
        pool.install(|| (0..config.restarts).into_par_iter().map(work).collect())
    };
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.1 > runs[best].1 {
            best = i;
        }
    }
    let trace =
        (0..=config.sweeps).map(|k| runs.iter().fold(-T::max_value().unwrap(), |acc, r| acc.max(r.2[k]))).collect();
    let strategy = prob.strategy(&runs[best].0)?;
    let report = achievable_rate(&assemble(model, &strategy)?)?;
    Ok(OptimizationResult {
        strategy,
        report,
        best_restart: best,
        restart_rates: runs.iter().map(|r| r.1).collect(),
        trace,
    })
}
