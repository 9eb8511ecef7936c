//! Fixed subsystem names used by models, strategies and the coding scheme.

/// Action input.
pub const G: &str = "G";
/// Channel environment.
pub const S: &str = "S";
/// Encoder side information.
pub const S0: &str = "S0";
/// Channel input.
pub const A: &str = "A";
/// Channel output.
pub const B: &str = "B";
/// Classical auxiliary register carrying `v`.
pub const V: &str = "V";
/// Classical auxiliary register carrying `u`.
pub const U: &str = "U";
/// Reference purifying the action state.
pub const K0: &str = "K0";
/// Environment of the action channel dilation.
pub const K1: &str = "K1";
/// Environment of the encoder dilation.
pub const T: &str = "T";
/// Subcodebook index.
pub const L: &str = "L";
/// Generic dilation environment.
pub const E: &str = "E";
