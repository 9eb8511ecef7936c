//! Quantum channels in Kraus and Stinespring form, purifications, and the
//! explicit Uhlmann-based encoder.

mod dilation;
mod encoding;
mod kraus;
mod purification;

pub use dilation::{kraus_to_stinespring, StinespringIsometry};
pub use encoding::{build_purified_encoding, encoding_dimension, PurifiedEncoding};
pub use kraus::{choi_of, diagnose, ChannelDiagnostics, KrausChannel};
pub use purification::{overlap, pure_purified_distance, purify, uhlmann_isometry, Purification};
