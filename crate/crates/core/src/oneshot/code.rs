use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::generator;
use crate::scalar::Real;

/// Message count `M = 2^R` and subcodebook size `L = 2^{R_S}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeParams {
    pub m: usize,
    pub l: usize,
}

impl CodeParams {
    pub fn new(m: usize, l: usize) -> Result<Self> {
        for (name, x) in [("M", m), ("L", l)] {
            if x == 0 || !x.is_power_of_two() {
                return Err(Error::BadCodeParams(format!("{} = {} is not a positive power of two", name, x)));
            }
        }
        Ok(CodeParams { m, l })
    }

    /// `R = log2 M`.
    pub fn r(&self) -> f64 {
        self.m.trailing_zeros() as f64
    }

    /// `R_S = log2 L`.
    pub fn rs(&self) -> f64 {
        self.l.trailing_zeros() as f64
    }

    pub fn rate_sum(&self) -> f64 {
        self.r() + self.rs()
    }
}

/// Codewords `u(m)` and `v(m, l)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    pub u: Vec<usize>,
    pub v: Vec<Vec<usize>>,
    pub seed: u64,
}

fn categorical<T: Real, R: Rng>(p: &[T], rng: &mut R) -> usize {
    let x: f64 = rng.random();
    let total: f64 = p.iter().map(|q| q.as_f64()).sum();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, q) in p.iter().enumerate() {
        let q = q.as_f64();
        if q <= 0.0 {
            continue;
        }
        acc += q / total;
        last = i;
        if x < acc {
            return i;
        }
    }
    last
}

/// Draws `u(m)` i.i.d. from `p_U` and `v(m, l)` i.i.d. from `p_{V|U}(.|u(m))`.
pub fn sample_codebook<T: Real>(p_vu: &[Vec<T>], params: CodeParams, seed: u64) -> Result<Codebook> {
    let nu = p_vu.first().map(Vec::len).unwrap_or(0);
    let p_u: Vec<T> = (0..nu).map(|u| p_vu.iter().fold(T::zero(), |a, row| a + row[u])).collect();
    if !(p_u.iter().fold(T::zero(), |a, &b| a + b) > T::zero()) {
        return Err(Error::BadDistribution("p_U has no mass".into()));
    }
    let mut rng = generator(seed);
    let mut u = Vec::with_capacity(params.m);
    let mut v = Vec::with_capacity(params.m);
    for _ in 0..params.m {
        let um = categorical(&p_u, &mut rng);
        let cond: Vec<T> = p_vu.iter().map(|row| row[um]).collect();
        u.push(um);
        v.push((0..params.l).map(|_| categorical(&cond, &mut rng)).collect());
    }
    Ok(Codebook { u, v, seed })
}
