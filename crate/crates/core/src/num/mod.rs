//! Small numeric building blocks shared across the crate.

pub mod dual;

pub use dual::{Dual, Scalar};

/// Seed width used by the assembly routines: enough lanes for a state
/// (m ≤ 4) plus a gradient (m·d ≤ 8) in one pass.
pub const NDERIV: usize = 12;

/// Dual number with the crate-wide seed width.
pub type Ad = Dual<NDERIV>;
