use crate::error::{Error, Result};
use crate::linalg::{
    distinct_eigenvalue_count, matrix_function, order_projector, pinch, DensityMatrix, LabeledOperator, Register,
};
use crate::names::{B, U, V};
use crate::scalar::{CMatrix, Real};

use super::{CodeParams, Codebook};

/// The projector `{E(rho_VUB) >= 2^{R+R_S} rho_VU ⊗ rho_B}`, where `E` pinches
/// with respect to `rho_VU ⊗ rho_B`. It depends on the code only through
/// `R + R_S`, so it is shared by every codebook of a run.
#[derive(Clone, Debug)]
pub struct DecisionRegion<T: Real> {
    pub pi_vub: LabeledOperator<T>,
    /// `rho_VU ⊗ rho_B`.
    pub product: DensityMatrix<T>,
    /// Distinct eigenvalues of `rho_VU ⊗ rho_B`.
    pub nu1: usize,
    pub rate_sum: f64,
    nv: usize,
    nu: usize,
    db: usize,
}

/// Builds the decision region from a classical-quantum state on `V U B`.
pub fn decision_region<T: Real>(rho_vub: &DensityMatrix<T>, rate_sum: f64) -> Result<DecisionRegion<T>> {
    let reg = rho_vub.register();
    let names: Vec<&str> = reg.names().collect();
    if names != [V, U, B] {
        return Err(Error::RegisterMismatch(format!("expected a state on V ⊗ U ⊗ B, got {}", reg)));
    }
    if !(rate_sum >= 0.0) || !rate_sum.is_finite() {
        return Err(Error::BadCodeParams(format!("rate sum {} must be finite and nonnegative", rate_sum)));
    }
    let product = rho_vub.partial_trace(&[V, U])?.tensor(&rho_vub.partial_trace(&[B])?)?;
    let pinched = pinch(product.op(), rho_vub.op())?;
    let threshold = product.op().scale(T::of(rate_sum.exp2()));
    let pi_vub = order_projector(&pinched, &threshold)?;
    let nu1 = distinct_eigenvalue_count(product.op(), T::cluster_tol())?;
    let dims = reg.dims();
    Ok(DecisionRegion { pi_vub, product, nu1, rate_sum, nv: dims[0], nu: dims[1], db: dims[2] })
}

impl<T: Real> DecisionRegion<T> {
    pub fn b_register(&self) -> Register {
        self.pi_vub.register().retain(&[B]).expect("B present")
    }

    /// `Tr_VU[Pi (|v u><v u| ⊗ I_B)]`, which is the `(v, u)` diagonal block.
    pub fn gamma(&self, v: usize, u: usize) -> LabeledOperator<T> {
        let off = (v * self.nu + u) * self.db;
        let m = self.pi_vub.matrix().view((off, off), (self.db, self.db)).into_owned();
        LabeledOperator::new(self.b_register(), m).expect("square").hermitian_part()
    }

    pub fn aux_dims(&self) -> (usize, usize) {
        (self.nv, self.nu)
    }
}

/// Normalized decoding measurement `beta(m, l)` plus a completion element.
#[derive(Clone, Debug)]
pub struct DecoderPOVM<T: Real> {
    pub beta: Vec<Vec<LabeledOperator<T>>>,
    pub completion: LabeledOperator<T>,
    pub pi_vub: LabeledOperator<T>,
    pub nu1: usize,
    /// True when `sum gamma` is rank deficient and the completion is nonzero.
    pub singular_gamma: bool,
}

/// `beta(m,l) = G^{-1/2} gamma(m,l) G^{-1/2}` with `G = sum gamma` inverted
/// on its support; the completion is `I - sum beta`.
pub fn decoder_from_region<T: Real>(region: &DecisionRegion<T>, cb: &Codebook) -> Result<DecoderPOVM<T>> {
    let (nv, nu) = region.aux_dims();
    if cb.u.iter().any(|&u| u >= nu) || cb.v.iter().flatten().any(|&v| v >= nv) {
        return Err(Error::RegisterMismatch("codebook index outside the auxiliary alphabet".into()));
    }
    let breg = region.b_register();
    let gamma: Vec<Vec<LabeledOperator<T>>> =
        cb.v.iter().zip(&cb.u).map(|(row, &u)| row.iter().map(|&v| region.gamma(v, u)).collect()).collect();
    let mut total = LabeledOperator::zeros(breg.clone());
    for g in gamma.iter().flatten() {
        total = total.add(g)?;
    }
    let total = total.hermitian_part();
    let inv_sqrt = matrix_function(&total, |x| T::one() / x.sqrt(), true)?;
    let beta: Vec<Vec<LabeledOperator<T>>> = gamma
        .iter()
        .map(|row| {
            row.iter().map(|g| Ok(inv_sqrt.mul(g)?.mul(&inv_sqrt)?.hermitian_part())).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sum = CMatrix::<T>::zeros(breg.dim(), breg.dim());
    for b in beta.iter().flatten() {
        sum += b.matrix();
    }
    let completion = LabeledOperator::identity(breg.clone()).sub(&LabeledOperator::new(breg, sum)?)?.hermitian_part();
    let singular_gamma = completion.trace_re() > T::of(0.5);
    Ok(DecoderPOVM { beta, completion, pi_vub: region.pi_vub.clone(), nu1: region.nu1, singular_gamma })
}

/// Decoder for a codebook drawn for the given code parameters.
pub fn build_decoder<T: Real>(rho_vub: &DensityMatrix<T>, cb: &Codebook, params: CodeParams) -> Result<DecoderPOVM<T>> {
    if cb.u.len() != params.m || cb.v.iter().any(|r| r.len() != params.l) {
        return Err(Error::BadCodeParams("codebook shape does not match M x L".into()));
    }
    decoder_from_region(&decision_region(rho_vub, params.rate_sum())?, cb)
}

impl<T: Real> DecoderPOVM<T> {
    /// `sum_l beta(m, l)`.
    pub fn success_operator(&self, m: usize) -> Result<LabeledOperator<T>> {
        let mut acc = LabeledOperator::zeros(self.completion.register().clone());
        for b in &self.beta[m] {
            acc = acc.add(b)?;
        }
        Ok(acc)
    }
}
