use crate::divergences::purified_distance;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, LabeledVector, Register};
use crate::names::{A, K0, K1, L, S, S0, T as TN};
use crate::scalar::{cre, CMatrix, CVector, Real};

use super::{kraus_to_stinespring, pure_purified_distance, purify, uhlmann_isometry, KrausChannel, Purification};

/// Explicit purified encoder for one message: the post-action pure state,
/// the per-index branches after the encoder dilations, their uniform
/// superposition, and an Uhlmann isometry from `S0` into `A T L`.
#[derive(Clone, Debug)]
pub struct PurifiedEncoding<T: Real> {
    /// Pure state on `S K1 K0` with reference `S0`.
    pub psi: Purification<T>,
    /// One pure state on `S K1 K0 A T` per subcodebook index.
    pub branches: Vec<LabeledVector<T>>,
    /// `L^{-1/2} sum_l |branch_l>|l>` on `S K1 K0 A T L`, reference `A T L`.
    pub superposed_state: Purification<T>,
    /// Name of the index subsystem.
    pub index_register: String,
    /// Isometry `S0 -> A T L`.
    pub uhlmann_isometry: CMatrix<T>,
    /// `(I ⊗ W) psi`.
    pub encoded: Purification<T>,
}

/// Total dimension of the `S A T K1 K0 L` register the construction needs.
pub fn encoding_dimension<T: Real>(
    action: &KrausChannel<T>,
    action_state: &DensityMatrix<T>,
    encoders: &[&KrausChannel<T>],
) -> usize {
    let d_s = action.output().dim_of(S).unwrap_or(1);
    let d_a = encoders.first().map(|f| f.output().dim()).unwrap_or(1);
    let d_t = encoders.iter().map(|f| f.kraus().len()).max().unwrap_or(1);
    let d_k1 = action.kraus().len();
    let rank = crate::linalg::eigenvalues(action_state.op())
        .map(|ev| {
            let top = ev.first().copied().unwrap_or(T::zero());
            ev.iter().filter(|&&l| l > T::support_tol() * top).count().max(1)
        })
        .unwrap_or(action_state.dim());
    d_s * d_a * d_t * d_k1 * rank * encoders.len()
}

/// Builds the purified encoder for an action state `sigma_G` and the
/// encoders `F^{v(l)}`, one per subcodebook index.
pub fn build_purified_encoding<T: Real>(
    action: &KrausChannel<T>,
    action_state: &DensityMatrix<T>,
    encoders: &[&KrausChannel<T>],
) -> Result<PurifiedEncoding<T>> {
    if encoders.is_empty() {
        return Err(Error::BadCodeParams("empty subcodebook".into()));
    }
    let out = action.output();
    if out.len() != 2 || !out.contains(S) || !out.contains(S0) {
        return Err(Error::RegisterMismatch(format!("action channel output {} must be S ⊗ S0", out)));
    }
    let sigma = purify(action_state, K0)?;
    let t_dil = kraus_to_stinespring(action, K1)?;
    let psi_vec = t_dil.apply_vector(sigma.vector())?;
    let psi = Purification::new(psi_vec, &[S0])?;

    let k_t = encoders.iter().map(|f| f.kraus().len()).max().unwrap();
    let branch_order = [S, K1, K0, A, TN];
    let mut branches = Vec::with_capacity(encoders.len());
    for f in encoders {
        if f.input().names().ne([S0]) || f.output().names().ne([A]) {
            return Err(Error::RegisterMismatch(format!("encoder {} -> {} must map S0 to A", f.input(), f.output())));
        }
        let dil = kraus_to_stinespring(&f.pad_to(k_t), TN)?;
        branches.push(dil.apply_vector(psi.vector())?.permute(&branch_order)?);
    }
    if branches.iter().any(|b| b.register() != branches[0].register()) {
        return Err(Error::RegisterMismatch("encoders disagree on the A register".into()));
    }

    let n = encoders.len();
    let index = Register::single(L, n)?;
    let reg = branches[0].register().concat(&index)?;
    let db = branches[0].register().dim();
    let amp = cre(T::one() / T::of(n as f64).sqrt());
    let mut v = CVector::zeros(db * n);
    for (l, b) in branches.iter().enumerate() {
        for i in 0..db {
            v[i * n + l] = b.vector()[i] * amp;
        }
    }
    let superposed_state = Purification::new(LabeledVector::new(reg, v)?, &[A, TN, L])?;
    let w = uhlmann_isometry(&psi, &superposed_state)?;
    let encoded = psi.map_reference(&w, superposed_state.reference().clone())?;
    Ok(PurifiedEncoding {
        psi,
        branches,
        superposed_state,
        index_register: L.to_string(),
        uhlmann_isometry: w,
        encoded,
    })
}

impl<T: Real> PurifiedEncoding<T> {
    /// Purified distance between the superposed state and the encoded state.
    pub fn encoded_distance(&self) -> Result<T> {
        pure_purified_distance(self.superposed_state.vector(), self.encoded.vector())
    }

    /// `sigma_S`, the environment marginal before encoding.
    pub fn sigma_s(&self) -> Result<DensityMatrix<T>> {
        self.psi.marginal().partial_trace(&[S])
    }

    /// Average over branches of the `S` marginals.
    pub fn tau_s(&self) -> Result<DensityMatrix<T>> {
        let states =
            self.branches.iter().map(|b| DensityMatrix::pure(b)?.partial_trace(&[S])).collect::<Result<Vec<_>>>()?;
        let w = vec![T::one() / T::of(states.len() as f64); states.len()];
        let refs: Vec<&DensityMatrix<T>> = states.iter().collect();
        DensityMatrix::mixture(&w, &refs)
    }

    /// `P(tau_S, sigma_S)`.
    pub fn marginal_distance(&self) -> Result<T> {
        purified_distance(&self.tau_s()?, &self.sigma_s()?)
    }

    /// Channel input state on `S A` produced by the encoded state.
    pub fn channel_input(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::pure(self.encoded.vector())?.partial_trace(&[S, A])
    }
}
