use crate::error::{Error, Result};
use crate::linalg::{operator_norm, LabeledVector, Register};
use crate::scalar::{CMatrix, Real};

use super::KrausChannel;

/// Isometry `V = sum_j K_j ⊗ |j>_E` from the input register into
/// `output ⊗ env`.
#[derive(Clone, Debug, PartialEq)]
pub struct StinespringIsometry<T: Real> {
    isometry: CMatrix<T>,
    input: Register,
    output: Register,
    env: Register,
}

impl<T: Real> StinespringIsometry<T> {
    pub fn new(input: Register, output: Register, env: Register, isometry: CMatrix<T>) -> Result<Self> {
        let rows = output.dim() * env.dim();
        if isometry.nrows() != rows || isometry.ncols() != input.dim() {
            return Err(Error::RegisterMismatch(format!(
                "isometry is {}x{}, expected {}x{}",
                isometry.nrows(),
                isometry.ncols(),
                rows,
                input.dim()
            )));
        }
        let d = input.dim();
        let r = operator_norm(&(isometry.adjoint() * &isometry - CMatrix::identity(d, d)));
        if !(r <= T::channel_tol()) {
            return Err(Error::InvalidChannel(format!("isometry residual {}", r)));
        }
        Ok(StinespringIsometry { isometry, input, output, env })
    }

    pub fn isometry(&self) -> &CMatrix<T> {
        &self.isometry
    }

    pub fn input(&self) -> &Register {
        &self.input
    }

    pub fn output(&self) -> &Register {
        &self.output
    }

    pub fn env(&self) -> &Register {
        &self.env
    }

    /// `output ⊗ env`.
    pub fn full_output(&self) -> Register {
        self.output.concat(&self.env).expect("disjoint by construction")
    }

    /// Applies `V` to the input subsystems of a pure state.
    pub fn apply_vector(&self, psi: &LabeledVector<T>) -> Result<LabeledVector<T>> {
        psi.apply_local(&self.input, &self.full_output(), &self.isometry)
    }

    /// Recovers the Kraus form by slicing along the environment.
    pub fn to_channel(&self) -> KrausChannel<T> {
        let (d_o, k) = (self.output.dim(), self.env.dim());
        let kraus =
            (0..k).map(|j| CMatrix::from_fn(d_o, self.input.dim(), |o, i| self.isometry[(o * k + j, i)])).collect();
        KrausChannel::new(self.input.clone(), self.output.clone(), kraus).expect("isometry is trace preserving")
    }
}

/// Dilation with a single environment subsystem `env_name` whose dimension is
/// the Kraus count.
pub fn kraus_to_stinespring<T: Real>(ch: &KrausChannel<T>, env_name: &str) -> Result<StinespringIsometry<T>> {
    let k = ch.kraus().len();
    let env = Register::single(env_name, k)?;
    let (d_o, d_i) = (ch.output().dim(), ch.input().dim());
    let mut v = CMatrix::zeros(d_o * k, d_i);
    for (j, kj) in ch.kraus().iter().enumerate() {
        for o in 0..d_o {
            for i in 0..d_i {
                v[(o * k + j, i)] = kj[(o, i)];
            }
        }
    }
    StinespringIsometry::new(ch.input().clone(), ch.output().clone(), env, v)
}
