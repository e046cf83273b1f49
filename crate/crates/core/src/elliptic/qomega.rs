//! Exact elements of ℚ(ω) with rational coordinates, for global point
//! arithmetic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{EisInt, FieldElem, Fq, ResidueField};
use crate::error::{Error, Result};

/// `a + bω` with `a, b ∈ ℚ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QOmega {
    pub a: BigRational,
    pub b: BigRational,
}

fn rat(n: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QOmega {
    pub fn zero() -> Self {
        QOmega { a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn omega() -> Self {
        QOmega { a: BigRational::zero(), b: BigRational::one() }
    }

    pub fn from_int(n: i128) -> Self {
        QOmega { a: rat(n), b: BigRational::zero() }
    }

    pub fn from_eis(x: &EisInt) -> Self {
        QOmega { a: rat(x.a), b: rat(x.b) }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QOmega { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QOmega { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> Self {
        QOmega { a: -&self.a, b: -&self.b }
    }

    pub fn mul(&self, o: &Self) -> Self {
        // (a + bω)(c + dω) = (ac − bd) + (ad + bc − bd)ω
        let bd = &self.b * &o.b;
        QOmega {
            a: &self.a * &o.a - &bd,
            b: &self.a * &o.b + &self.b * &o.a - bd,
        }
    }

    pub fn scale(&self, k: i128) -> Self {
        let k = rat(k);
        QOmega { a: &self.a * &k, b: &self.b * k }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn conj(&self) -> Self {
        // ω ↦ ω² = −1 − ω
        QOmega { a: &self.a - &self.b, b: -&self.b }
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Zero);
        }
        let n = self.norm();
        let c = self.conj();
        Ok(QOmega { a: &c.a / &n, b: &c.b / &n })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one();
        let mut x = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&x);
            }
            x = x.square();
            e >>= 1;
        }
        acc
    }

    /// `(A + Bω, D)` with integral `A, B` and positive `D` such that
    /// `self = (A + Bω)/D`.
    pub fn integral_parts(&self) -> (BigInt, BigInt, BigInt) {
        let d = self.a.denom().lcm(self.b.denom());
        let a = self.a.numer() * (&d / self.a.denom());
        let b = self.b.numer() * (&d / self.b.denom());
        (a, b, d)
    }

    /// The element as a factored field element.
    pub fn to_field_elem(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::Zero);
        }
        let (a, b, d) = self.integral_parts();
        let conv = |x: &BigInt| {
            x.to_i128()
                .ok_or_else(|| Error::Invalid(format!("coordinate {x} out of range")))
        };
        FieldElem::ratio(&EisInt::new(conv(&a)?, conv(&b)?), &EisInt::from_int(conv(&d)?))
    }

    /// Reduction into a residue field; `None` when a denominator vanishes.
    pub fn reduce(&self, field: &ResidueField) -> Option<Fq> {
        let p = BigInt::from(field.characteristic());
        let red = |r: &BigRational| -> Option<Fq> {
            let den = r.denom().mod_floor(&p);
            if den.is_zero() {
                return None;
            }
            let num = r.numer().mod_floor(&p).to_i128()?;
            let den = field.from_int(den.to_i128()?);
            Some(field.mul(field.from_int(num), field.inv(den)?))
        };
        let a = red(&self.a)?;
        let b = red(&self.b)?;
        Some(field.add(a, field.mul(b, field.omega())))
    }

    pub fn as_eis(&self) -> Option<EisInt> {
        if !self.a.is_integer() || !self.b.is_integer() {
            return None;
        }
        Some(EisInt::new(self.a.to_integer().to_i128()?, self.b.to_integer().to_i128()?))
    }

    pub fn is_negative_rational(&self) -> bool {
        self.is_rational() && self.a.is_negative()
    }
}

impl fmt::Display for QOmega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(e) = self.as_eis() {
            return write!(f, "{e}");
        }
        let (a, b, d) = self.integral_parts();
        let num = match (a.to_i128(), b.to_i128()) {
            (Some(a), Some(b)) => EisInt::new(a, b).to_string(),
            _ => format!("{a}+{b}w"),
        };
        write!(f, "({num})/{d}")
    }
}

impl FromStr for QOmega {
    type Err = Error;

    /// `a+bw` or `(a+bw)/d`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, den) = match s.rsplit_once('/') {
            Some((n, d)) => {
                let d: i128 = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
                (n.trim().trim_start_matches('(').trim_end_matches(')'), d)
            }
            None => (s, 1),
        };
        if den == 0 {
            return Err(Error::Zero);
        }
        let x: EisInt = num.parse()?;
        let d = rat(den);
        Ok(QOmega { a: rat(x.a) / &d, b: rat(x.b) / d })
    }
}

impl serde::Serialize for QOmega {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for QOmega {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QOmega {
        s.parse().unwrap()
    }

    #[test]
    fn omega_is_a_cube_root_of_unity() {
        let w = QOmega::omega();
        assert_eq!(w.pow(3), QOmega::one());
        assert_eq!(w.square().add(&w).add(&QOmega::one()), QOmega::zero());
        assert_eq!(w.conj(), w.square());
    }

    #[test]
    fn inverse_and_text() {
        let x = q("(3+w)/2");
        assert_eq!(x.mul(&x.inv().unwrap()), QOmega::one());
        assert_eq!(x.to_string(), "(3+w)/2");
        assert_eq!(q("12+24w").square(), QOmega::from_int(-432));
    }

    #[test]
    fn field_elem_conversion() {
        let x = q("(7+2w)/5");
        assert_eq!(x.to_field_elem().unwrap(), FieldElem::parse("(7+2w)/(5)").unwrap());
    }
}
