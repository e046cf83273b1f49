//! Construction of classes with prescribed period and index: the prime-pair
//! conditions and search, the single-pair builder and index certifier, the
//! Galois action and norm, the sequence of pairs over ℚ(ζ₃)/ℚ and the
//! splitting plan for an extension of degree P.

pub mod certificate;
pub mod conditions;
pub mod galois;
pub mod search;
pub mod theorem1;
pub mod theorem2;
pub mod theorem3;

pub use conditions::{check_sc, evaluate_sc, evaluate_sc_sequence, Evidence};
