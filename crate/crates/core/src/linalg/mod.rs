//! Dense complex linear algebra over labeled multipartite registers.

mod operator;
mod register;
mod spectral;

pub use operator::{DensityMatrix, LabeledOperator, LabeledVector};
pub use register::{Register, Subsystem};
pub(crate) use spectral::eigh;
pub use spectral::{
    checked_hermitian, commutator_norm, distinct_eigenvalue_count, eigenvalues, matrix_function, min_eigenvalue,
    operator_norm, order_projector, pinch, psd_power, spectral_decompose, spectral_decompose_default,
    support_projector, Cluster, SpectralDecomposition,
};
