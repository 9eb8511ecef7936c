use serde::Serialize;

use crate::divergences::{sandwiched_renyi, Divergence};
use crate::error::{Error, Result};
use crate::io::serialize_extended_f64;
use crate::linalg::distinct_eigenvalue_count;
use crate::rate::JointStateBundle;
use crate::scalar::Real;

use super::CodeParams;

/// Default grid `{0.05, 0.10, ..., 0.45}`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 * 0.05).collect()
}

/// Terms of the one-shot error bound at one `alpha`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub alpha: f64,
    /// `D~_{1-alpha}(rho_VUB || rho_VU ⊗ rho_B)`.
    pub d_channel: f64,
    /// `D~_{1+alpha}(rho_VUS || rho_{V-U-S})`.
    #[serde(serialize_with = "serialize_extended_f64")]
    pub d_state: f64,
    pub first_term: f64,
    #[serde(serialize_with = "serialize_extended_f64")]
    pub second_term: f64,
    #[serde(serialize_with = "serialize_extended_f64")]
    pub total: f64,
}

/// Largest distinct-eigenvalue count of `sigma_S^u` over `u` with
/// `p_U(u)` above the support cutoff.
pub fn nu2<T: Real>(bundle: &JointStateBundle<T>) -> Result<usize> {
    let p_u = bundle.p_u();
    let mut best = 0;
    for (u, s) in bundle.sigma_s.iter().enumerate() {
        if p_u[u] > T::support_tol() {
            best = best.max(distinct_eigenvalue_count(s.op(), T::cluster_tol())?);
        }
    }
    Ok(best)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::BadOrder(alpha));
    }
    Ok(())
}

/// `12 nu1^a 2^{a(R + R_S - D~_{1-a})} + (2/a) nu2^a 2^{-a R_S} 2^{a D~_{1+a}}`
/// for explicit rates `r`, `rs` (which need not come from a materialized
/// code).
pub fn proposition1_bound_rates<T: Real>(
    bundle: &JointStateBundle<T>,
    r: f64,
    rs: f64,
    alpha: f64,
) -> Result<BoundValue> {
    check_alpha(alpha)?;
    let product = bundle.product_vu_b()?;
    let nu1 = distinct_eigenvalue_count(product.op(), T::cluster_tol())? as f64;
    let nu2 = nu2(bundle)? as f64;
    let a = T::of(alpha);
    let d_channel = sandwiched_renyi(&bundle.rho_vub, &product, T::one() - a)?.as_f64();
    let d_state = sandwiched_renyi(&bundle.rho_vus, &bundle.rho_markov, T::one() + a)?;
    let first_term = 12.0 * nu1.powf(alpha) * (alpha * (r + rs - d_channel)).exp2();
    let second_term = match d_state {
        Divergence::Finite(d) => (2.0 / alpha) * nu2.powf(alpha) * (-alpha * rs).exp2() * (alpha * d.as_f64()).exp2(),
        Divergence::Infinite => f64::INFINITY,
    };
    Ok(BoundValue {
        alpha,
        d_channel,
        d_state: d_state.as_f64(),
        first_term,
        second_term,
        total: first_term + second_term,
    })
}

pub fn proposition1_bound<T: Real>(bundle: &JointStateBundle<T>, params: CodeParams, alpha: f64) -> Result<BoundValue> {
    proposition1_bound_rates(bundle, params.r(), params.rs(), alpha)
}

/// Bound at every grid point and the index of the smallest.
pub fn bound_over_grid<T: Real>(
    bundle: &JointStateBundle<T>,
    params: CodeParams,
    grid: &[f64],
) -> Result<(Vec<BoundValue>, usize)> {
    if grid.is_empty() {
        return Err(Error::BadOrder(f64::NAN));
    }
    let values = grid.iter().map(|&a| proposition1_bound(bundle, params, a)).collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.total < values[best].total {
            best = i;
        }
    }
    Ok((values, best))
}
