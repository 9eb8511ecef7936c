//! Scalar abstraction.
//!
//! Every numerical routine in the crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Complex entries are `Complex<T>`.
//! Tolerances are part of the scalar type because an absolute threshold such
//! as `1e-10` is meaningless in single precision.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{Complex, ComplexField, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar used throughout the crate.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Relative tolerance for merging nearby eigenvalues into one cluster.
    fn cluster_tol() -> Self;
    /// Relative cutoff (against the largest eigenvalue) below which an
    /// eigenvalue is treated as outside the support.
    fn support_tol() -> Self;
    /// Largest relative asymmetry that is silently symmetrized away.
    fn hermitian_tol() -> Self;
    /// Tolerance used when validating density matrices.
    fn state_tol() -> Self;
    /// Tolerance used when validating channel completeness.
    fn channel_tol() -> Self;

    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn cluster_tol() -> Self {
        1e-8
    }
    fn support_tol() -> Self {
        1e-12
    }
    fn hermitian_tol() -> Self {
        1e-9
    }
    fn state_tol() -> Self {
        1e-10
    }
    fn channel_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn cluster_tol() -> Self {
        1e-4
    }
    fn support_tol() -> Self {
        1e-6
    }
    fn hermitian_tol() -> Self {
        1e-4
    }
    fn state_tol() -> Self {
        1e-5
    }
    fn channel_tol() -> Self {
        1e-5
    }
}

pub type C<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub fn cre<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn c64<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Largest absolute entry of a complex matrix.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// Sum of `xs` by recursive halving, so the rounding pattern depends only on
/// the length of the slice.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
