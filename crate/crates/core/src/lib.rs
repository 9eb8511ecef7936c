//! Achievable rates and one-shot random coding for quantum channels whose
//! environment state is chosen by an action.
//!
//! The sender prepares an action state on `G`; the action channel turns it
//! into an environment `S` plus side information `S0`; an encoder maps `S0`
//! to the channel input `A`; and the communication channel maps `S A` to the
//! output `B`. [`rate::achievable_rate`] evaluates
//! `I(VU;B) - I(V;S|U)` for a strategy, and [`oneshot`] simulates the
//! random-coding scheme with a pinching decoder and compares the measured
//! error with its analytic bound.
//!
//! Everything numeric is generic over [`scalar::Real`]; the aliases below
//! fix the scalar to `f64` or `f32`.
//!
//! ```
//! use qadc::{DensityMatrixF64, linalg::Register, divergences::von_neumann_entropy};
//!
//! let rho = DensityMatrixF64::maximally_mixed(Register::single("A", 4).unwrap());
//! let h = von_neumann_entropy(&rho).unwrap();
//! assert!((h - 2.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod digest;
pub mod divergences;
pub mod error;
pub mod io;
pub mod linalg;
pub mod names;
pub mod oneshot;
pub mod random;
pub mod rate;
pub mod rng;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DensityMatrixF64 = linalg::DensityMatrix<f64>;
pub type DensityMatrixF32 = linalg::DensityMatrix<f32>;
pub type LabeledOperatorF64 = linalg::LabeledOperator<f64>;
pub type LabeledOperatorF32 = linalg::LabeledOperator<f32>;
pub type LabeledVectorF64 = linalg::LabeledVector<f64>;
pub type KrausChannelF64 = channels::KrausChannel<f64>;
pub type KrausChannelF32 = channels::KrausChannel<f32>;
pub type ActionModelF64 = rate::ActionModel<f64>;
pub type StrategyF64 = rate::Strategy<f64>;
pub type JointStateBundleF64 = rate::JointStateBundle<f64>;
pub type DivergenceF64 = divergences::Divergence<f64>;
