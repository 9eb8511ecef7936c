use crate::error::{Error, Result};
use crate::linalg::{eigh, DensityMatrix, LabeledOperator, LabeledVector, Register};
use crate::scalar::{cre, CMatrix, CVector, Real, C};
use nalgebra::ComplexField;

/// Pure state on `system ⊗ reference`, stored with the system subsystems
/// first.
#[derive(Clone, Debug, PartialEq)]
pub struct Purification<T: Real> {
    vector: LabeledVector<T>,
    system: Register,
    reference: Register,
}

impl<T: Real> Purification<T> {
    /// `reference` lists the subsystems of `vector` that act as reference; the
    /// rest form the system, kept in their original order.
    pub fn new<S: AsRef<str>>(vector: LabeledVector<T>, reference: &[S]) -> Result<Self> {
        let reg = vector.register().clone();
        let reference = reg.select(reference)?;
        let sys_names: Vec<&str> = reg.names().filter(|n| !reference.contains(n)).collect();
        let system = reg.retain(&sys_names)?;
        let n = vector.norm();
        if !((n - T::one()).abs() <= T::state_tol()) {
            return Err(Error::InvalidPurification(format!("norm {} differs from 1", n)));
        }
        let order: Vec<String> = system.names().chain(reference.names()).map(str::to_string).collect();
        let vector = vector.permute(&order)?;
        Ok(Purification { vector, system, reference })
    }

    /// Builds `sum_{s,r} c[s,r] |s>|r>`.
    pub fn from_coefficients(system: Register, reference: Register, c: &CMatrix<T>) -> Result<Self> {
        if c.nrows() != system.dim() || c.ncols() != reference.dim() {
            return Err(Error::RegisterMismatch(format!(
                "coefficient matrix is {}x{}, expected {}x{}",
                c.nrows(),
                c.ncols(),
                system.dim(),
                reference.dim()
            )));
        }
        let dr = reference.dim();
        let v = CVector::from_fn(system.dim() * dr, |i, _| c[(i / dr, i % dr)]);
        let reg = system.concat(&reference)?;
        let names: Vec<String> = reference.names().map(str::to_string).collect();
        Purification::new(LabeledVector::new(reg, v)?, &names)
    }

    pub fn vector(&self) -> &LabeledVector<T> {
        &self.vector
    }

    pub fn system(&self) -> &Register {
        &self.system
    }

    pub fn reference(&self) -> &Register {
        &self.reference
    }

    /// Coefficients `c[s, r]`.
    pub fn coefficients(&self) -> CMatrix<T> {
        self.vector.split_matrix(self.system.len())
    }

    /// Reduced state on the system: `C C†`.
    pub fn marginal(&self) -> DensityMatrix<T> {
        let c = self.coefficients();
        let op = LabeledOperator::new(self.system.clone(), &c * c.adjoint()).expect("square");
        DensityMatrix::from_op_unchecked(op.hermitian_part())
    }

    /// `(I ⊗ W)|phi>` for `W` mapping the reference into `new_reference`.
    pub fn map_reference(&self, w: &CMatrix<T>, new_reference: Register) -> Result<Self> {
        if w.ncols() != self.reference.dim() || w.nrows() != new_reference.dim() {
            return Err(Error::RegisterMismatch(format!(
                "reference map is {}x{}, expected {}x{}",
                w.nrows(),
                w.ncols(),
                new_reference.dim(),
                self.reference.dim()
            )));
        }
        let c = self.coefficients() * w.transpose();
        Purification::from_coefficients(self.system.clone(), new_reference, &c)
    }
}

/// Canonical purification `sum_i sqrt(l_i) |e_i>|i>` with eigenvalues in
/// descending order, restricted to the support. The first non-negligible
/// entry of each eigenvector is made real positive.
pub fn purify<T: Real>(rho: &DensityMatrix<T>, reference_name: &str) -> Result<Purification<T>> {
    let eig = eigh(rho.matrix())?;
    let cutoff = T::support_tol() * eig.values[0].max(T::zero());
    let rank = eig.values.iter().filter(|&&l| l > cutoff).count().max(1);
    let d = rho.dim();
    let mut c = CMatrix::zeros(d, rank);
    for i in 0..rank {
        let mut e = eig.vectors.column(i).into_owned();
        if let Some(first) = e.iter().find(|z| z.modulus() > T::cluster_tol()) {
            let phase = first.conj() / cre(first.modulus());
            e *= phase;
        }
        let s = cre(eig.values[i].max(T::zero()).sqrt());
        for r in 0..d {
            c[(r, i)] = e[r] * s;
        }
    }
    let reference = Register::single(reference_name, rank)?;
    Purification::from_coefficients(rho.register().clone(), reference, &c)
}

/// Extends `kept` (orthonormal) to `total` orthonormal columns of length
/// `dim` by Gram-Schmidt over the standard basis in index order.
fn complete_columns<T: Real>(mut kept: Vec<CVector<T>>, dim: usize, total: usize) -> CMatrix<T> {
    let mut i = 0;
    while kept.len() < total && i < dim {
        let mut e = CVector::<T>::zeros(dim);
        e[i] = cre(T::one());
        for _ in 0..2 {
            for q in &kept {
                let ov = q.dotc(&e);
                e -= q * ov;
            }
        }
        let n = e.norm();
        if n > T::of(1e-3) {
            kept.push(e / cre(n));
        }
        i += 1;
    }
    CMatrix::from_columns(&kept)
}

/// Isometry `W` from the reference of `phi` into the reference of `psi`
/// maximizing `|<psi|(I ⊗ W)|phi>|`, which then equals the fidelity of
/// the two system marginals.
///
/// With `X = C_phi^T conj(C_psi) = U S V†`, `W = V U†`. Singular pairs at
/// (numerically) zero singular value are replaced by a deterministic
/// completion.
pub fn uhlmann_isometry<T: Real>(phi: &Purification<T>, psi: &Purification<T>) -> Result<CMatrix<T>> {
    if phi.system() != psi.system() {
        return Err(Error::RegisterMismatch(format!(
            "purifications of different systems {} and {}",
            phi.system(),
            psi.system()
        )));
    }
    let (d1, d2) = (phi.reference().dim(), psi.reference().dim());
    if d1 > d2 {
        return Err(Error::ReferenceTooLarge { source_dim: d1, target_dim: d2 });
    }
    let x = phi.coefficients().transpose() * psi.coefficients().conjugate();
    let svd = x.svd(true, true);
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Numerical("singular value decomposition failed".into())),
    };
    let smax = svd.singular_values.iter().fold(T::zero(), |a, &b| a.max(b));
    let cutoff = T::cluster_tol() * smax.max(T::one());
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            us.push(u.column(i).into_owned());
            vs.push(vt.row(i).adjoint());
        }
    }
    let u_full = complete_columns(us, d1, d1);
    let v_full = complete_columns(vs, d2, d1);
    Ok(v_full * u_full.adjoint())
}

/// `|<a|b>|` for unit vectors on the same register.
pub fn overlap<T: Real>(a: &LabeledVector<T>, b: &LabeledVector<T>) -> Result<T> {
    Ok(a.inner(b)?.modulus())
}

/// Purified distance between two pure states, computed as
/// `sqrt(r(2 - r))` with `r = |a - e^{i t} b|^2 / 2` at the optimal phase,
/// which avoids the cancellation in `sqrt(1 - |<a|b>|^2)`.
pub fn pure_purified_distance<T: Real>(a: &LabeledVector<T>, b: &LabeledVector<T>) -> Result<T> {
    let ip = a.inner(b)?;
    let m = ip.modulus();
    let phase = if m > T::zero() { ip / cre(m) } else { C::new(T::one(), T::zero()) };
    let diff = a.vector() - b.vector() * phase.conj();
    let r = diff.norm_squared() / T::of(2.0);
    let r = r.min(T::one());
    Ok((r * (T::of(2.0) - r)).max(T::zero()).sqrt())
}
