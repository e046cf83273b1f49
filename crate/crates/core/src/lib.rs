//! Period-index obstruction machinery for genus one curves with full level
//! structure.
//!
//! The crate computes the obstruction map as a global norm-residue symbol,
//! searches for prime pairs under splitting conditions, builds classes of
//! large index over ℚ(ζ₃) and emits re-checkable certificates. A quadratic
//! brute-force oracle over ℚ backs the symbol layer.

pub mod arith;
pub mod brauer;
pub mod construct;
pub mod descent2;
pub mod elliptic;
pub mod error;
pub mod obstruction;
pub mod symbols;

pub use arith::{EisInt, EisPrime, FieldElem, FieldId, Place};
pub use error::{Error, Result};
