//! Exact arithmetic kernel: ℤ[ω], factored field elements, residue fields
//! and local power tests.

pub mod eis;
pub mod elem;
pub mod local;
pub mod residue;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use eis::{EisInt, EisPrime};
pub use elem::FieldElem;
pub use residue::{Fq, ResidueField};

/// The two catalog fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldId {
    #[serde(rename = "Q")]
    Rational,
    /// ℚ(ζ₃) = ℚ(ω), ω² + ω + 1 = 0.
    #[serde(rename = "Q(zeta3)")]
    Eisenstein,
}

impl FieldId {
    /// Coefficients of the generator's minimal polynomial, constant term first.
    pub fn min_poly(&self) -> &'static [i64] {
        match self {
            FieldId::Rational => &[0, 1],
            FieldId::Eisenstein => &[1, 1, 1],
        }
    }

    pub fn discriminant(&self) -> i64 {
        match self {
            FieldId::Rational => 1,
            FieldId::Eisenstein => -3,
        }
    }

    pub fn class_number_one(&self) -> bool {
        true
    }

    pub fn degree(&self) -> u32 {
        self.min_poly().len() as u32 - 1
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldId::Rational => "Q",
            FieldId::Eisenstein => "Q(zeta3)",
        })
    }
}

/// A place of a catalog field. Finite places of ℚ(ζ₃) are named by their
/// normalized prime; places of ℚ by a rational prime or the real embedding.
///
/// Ordering is deterministic: the real place, then rational primes, then
/// Eisenstein primes by norm and coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Rational(u64),
    Eisenstein(EisPrime),
}

impl Place {
    pub fn field(&self) -> FieldId {
        match self {
            Place::Eisenstein(_) => FieldId::Eisenstein,
            _ => FieldId::Rational,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Place::Real)
    }

    /// Residue characteristic; `None` at the real place.
    pub fn characteristic(&self) -> Option<u64> {
        match self {
            Place::Real => None,
            Place::Rational(p) => Some(*p),
            Place::Eisenstein(pi) => Some(pi.characteristic()),
        }
    }

    /// Residue field size.
    pub fn q(&self) -> Option<u64> {
        match self {
            Place::Real => None,
            Place::Rational(p) => Some(*p),
            Place::Eisenstein(pi) => Some(pi.norm()),
        }
    }

    pub fn prime(&self) -> Option<&EisPrime> {
        match self {
            Place::Eisenstein(pi) => Some(pi),
            _ => None,
        }
    }

    pub fn eisenstein(x: EisInt) -> Result<Self> {
        Ok(Place::Eisenstein(EisPrime::new(x)?))
    }

    pub fn rational(p: u64) -> Result<Self> {
        if eis::is_prime_u64(p) {
            Ok(Place::Rational(p))
        } else {
            Err(Error::Invalid(format!("{p} is not prime")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => f.write_str("inf"),
            Place::Rational(p) => write!(f, "{p}"),
            Place::Eisenstein(pi) => write!(f, "({pi})"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    /// `inf`, a rational prime like `5`, or a parenthesized Eisenstein prime
    /// like `(3+w)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "real" {
            return Ok(Place::Real);
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            return Place::eisenstein(inner.parse()?);
        }
        let p: u64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad place {s:?}")))?;
        Place::rational(p)
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
