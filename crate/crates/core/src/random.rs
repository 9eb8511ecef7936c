//! Random matrices, states and channels for tests, verification suites and
//! optimizer initialization.

use nalgebra::ComplexField;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channels::KrausChannel;
use crate::error::Result;
use crate::linalg::{DensityMatrix, LabeledOperator, LabeledVector, Register};
use crate::scalar::{cre, CMatrix, CVector, Real, C};

fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = StandardNormal.sample(rng);
    T::of(x)
}

/// Complex Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    let s = T::of(std::f64::consts::FRAC_1_SQRT_2);
    CMatrix::from_fn(rows, cols, |_, _| C::new(normal::<T, R>(rng) * s, normal::<T, R>(rng) * s))
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector<T> {
    let g = ginibre::<T, R>(d, 1, rng);
    CVector::from_fn(d, |i, _| g[(i, 0)])
}

/// Haar-distributed isometry with orthonormal columns (`rows >= cols`).
pub fn isometry<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre::<T, R>(rows, cols, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..cols {
        let d = r[(j, j)];
        let m = d.modulus();
        if m > T::zero() {
            let phase = d / cre(m);
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    isometry(d, d, rng)
}

pub fn pure_state<T: Real, R: Rng + ?Sized>(register: Register, rng: &mut R) -> LabeledVector<T> {
    let v = gaussian_vector::<T, R>(register.dim(), rng);
    let n = v.norm();
    LabeledVector::new(register, v / cre(n)).expect("dimension matches")
}

/// Random state `G G† / Tr(G G†)` with `G` a `d x rank` Ginibre matrix.
pub fn density<T: Real, R: Rng + ?Sized>(register: Register, rank: usize, rng: &mut R) -> DensityMatrix<T> {
    let g = ginibre::<T, R>(register.dim(), rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_op_unchecked(LabeledOperator::new(register, m / cre(tr)).expect("square"))
}

pub fn full_rank_density<T: Real, R: Rng + ?Sized>(register: Register, rng: &mut R) -> DensityMatrix<T> {
    let d = register.dim();
    density(register, d, rng)
}

/// Unnormalized positive semidefinite operator of the given rank.
pub fn psd<T: Real, R: Rng + ?Sized>(register: Register, rank: usize, rng: &mut R) -> LabeledOperator<T> {
    let g = ginibre::<T, R>(register.dim(), rank, rng);
    LabeledOperator::new(register, &g * g.adjoint()).expect("square")
}

pub fn hermitian<T: Real, R: Rng + ?Sized>(register: Register, rng: &mut R) -> LabeledOperator<T> {
    let g = ginibre::<T, R>(register.dim(), register.dim(), rng);
    let half = cre(T::of(0.5));
    LabeledOperator::new(register, (&g + g.adjoint()) * half).expect("square")
}

/// Orthogonal projector onto a Haar-random subspace.
pub fn projector<T: Real, R: Rng + ?Sized>(register: Register, rank: usize, rng: &mut R) -> LabeledOperator<T> {
    let v = isometry::<T, R>(register.dim(), rank, rng);
    LabeledOperator::new(register, &v * v.adjoint()).expect("square")
}

/// Point of the probability simplex drawn from the flat Dirichlet law.
pub fn probabilities<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| T::of(x / s)).collect()
}

/// Channel whose Stinespring isometry is Haar random. The Kraus count is
/// raised when the output is too small to carry the input.
pub fn channel<T: Real, R: Rng + ?Sized>(
    input: Register,
    output: Register,
    kraus_count: usize,
    rng: &mut R,
) -> Result<KrausChannel<T>> {
    let (di, d_o) = (input.dim(), output.dim());
    let k = kraus_count.max(di.div_ceil(d_o)).max(1);
    let v = isometry::<T, R>(d_o * k, di, rng);
    let kraus = (0..k).map(|j| CMatrix::from_fn(d_o, di, |o, i| v[(o * k + j, i)])).collect();
    KrausChannel::new(input, output, kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::generator;
    use crate::scalar::max_abs;

    #[test]
    fn isometry_columns_are_orthonormal() {
        let mut rng = generator(1);
        let v = isometry::<f64, _>(6, 3, &mut rng);
        assert!(max_abs(&(v.adjoint() * &v - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = generator(2);
        let r = Register::new([("A", 2), ("B", 3)]).unwrap();
        let rho = density::<f64, _>(r, 3, &mut rng);
        assert!(DensityMatrix::new(rho.into_op()).is_ok());
        let p = probabilities::<f64, _>(5, &mut rng);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
