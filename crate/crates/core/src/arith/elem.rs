//! Nonzero elements of ℚ(ζ₃) in factored form.
//!
//! An element is a unit `(1+ω)^k` times a finite product of normalized
//! primes with integer exponents. Multiplication is exponent addition, so
//! valuations and reductions never touch large coordinates.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::eis::{factor_with_cap, unfactor, EisInt, EisPrime, DEFAULT_NORM_CAP};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    unit: u8,
    primes: BTreeMap<EisPrime, i64>,
}

impl FieldElem {
    pub fn one() -> Self {
        FieldElem { unit: 0, primes: BTreeMap::new() }
    }

    pub fn from_eis(x: &EisInt) -> Result<Self> {
        Self::from_eis_with_cap(x, DEFAULT_NORM_CAP)
    }

    /// As `from_eis`, refusing inputs whose norm exceeds `cap`.
    pub fn from_eis_with_cap(x: &EisInt, cap: u128) -> Result<Self> {
        let (f, unit) = factor_with_cap(x, cap)?;
        Ok(FieldElem {
            unit,
            primes: f.into_iter().map(|(p, e)| (p, e as i64)).collect(),
        })
    }

    pub fn from_int(x: i128) -> Result<Self> {
        Self::from_eis(&EisInt::from_int(x))
    }

    /// `num / den`.
    pub fn ratio(num: &EisInt, den: &EisInt) -> Result<Self> {
        Ok(Self::from_eis(num)?.div(&Self::from_eis(den)?))
    }

    pub fn prime(p: &EisPrime) -> Self {
        FieldElem { unit: 0, primes: BTreeMap::from([(*p, 1)]) }
    }

    pub fn unit_elem(k: u8) -> Self {
        FieldElem { unit: k % 6, primes: BTreeMap::new() }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_with_cap(s, DEFAULT_NORM_CAP)
    }

    /// Parses `x` or `x/y` with Eisenstein integers `x`, `y`.
    pub fn parse_with_cap(s: &str, cap: u128) -> Result<Self> {
        let strip = |t: &str| t.trim().trim_matches(|c| c == '(' || c == ')').parse::<EisInt>();
        match s.split_once('/') {
            Some((n, d)) => Ok(Self::from_eis_with_cap(&strip(n)?, cap)?.div(&Self::from_eis_with_cap(&strip(d)?, cap)?)),
            None => Self::from_eis_with_cap(&strip(s)?, cap),
        }
    }

    /// Unit index `k`, meaning the unit part is `(1+ω)^k`.
    pub fn unit_index(&self) -> u8 {
        self.unit
    }

    pub fn factors(&self) -> impl Iterator<Item = (&EisPrime, &i64)> {
        self.primes.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &EisPrime> {
        self.primes.keys()
    }

    pub fn valuation(&self, p: &EisPrime) -> i64 {
        self.primes.get(p).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.unit == 0 && self.primes.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut primes = self.primes.clone();
        for (p, e) in &other.primes {
            let slot = primes.entry(*p).or_insert(0);
            *slot += e;
            if *slot == 0 {
                primes.remove(p);
            }
        }
        FieldElem { unit: (self.unit + other.unit) % 6, primes }
    }

    pub fn inv(&self) -> Self {
        FieldElem {
            unit: (6 - self.unit) % 6,
            primes: self.primes.iter().map(|(p, e)| (*p, -e)).collect(),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: i64) -> Self {
        if e == 0 {
            return Self::one();
        }
        FieldElem {
            unit: (self.unit as i64 * e).rem_euclid(6) as u8,
            primes: self.primes.iter().map(|(p, x)| (*p, x * e)).collect(),
        }
    }

    /// Galois conjugate under ω ↦ ω².
    pub fn conj(&self) -> Self {
        // conj((1+ω)^k) = (1+ω²)^k = (−ω)^k = (1+ω)^{5k}
        let mut out = FieldElem::unit_elem((5 * self.unit as u32 % 6) as u8);
        for (p, e) in &self.primes {
            let (cp, k) = p.value().conj().normalize();
            let part = FieldElem {
                unit: k,
                primes: BTreeMap::from([(EisPrime::new_unchecked(cp), 1)]),
            };
            out = out.mul(&part.pow(*e));
        }
        out
    }

    /// Canonical representative modulo n-th powers, for odd `n`: exponents
    /// reduced into `0..n`, unit reduced to a power of ω (−1 is an n-th power).
    pub fn reduce_mod_powers(&self, n: u32) -> Self {
        assert!(n % 2 == 1, "only odd levels are supported over Q(zeta3)");
        let n = n as i64;
        // (1+ω)^k = (−1)^k ω^{2k}; keep ω^{2k mod 3}
        let wexp = (2 * self.unit as i64).rem_euclid(3);
        let unit = (2 * wexp % 6) as u8;
        let primes = self
            .primes
            .iter()
            .filter_map(|(p, e)| {
                let r = e.rem_euclid(n);
                (r != 0).then_some((*p, r))
            })
            .collect();
        FieldElem { unit, primes }
    }

    /// Whether the element is an n-th power in ℚ(ζ₃)^× (n odd).
    pub fn is_global_nth_power(&self, n: u32) -> bool {
        self.reduce_mod_powers(n).is_one()
    }

    /// The element as an Eisenstein integer when all exponents are
    /// nonnegative.
    pub fn to_eis(&self) -> Option<EisInt> {
        if self.primes.values().any(|e| *e < 0) {
            return None;
        }
        let f: Vec<(EisPrime, u32)> = self.primes.iter().map(|(p, e)| (*p, *e as u32)).collect();
        Some(unfactor(&f, self.unit))
    }

    /// Numerator and denominator as Eisenstein integers.
    pub fn to_fraction(&self) -> (EisInt, EisInt) {
        let (mut num, mut den) = (Vec::new(), Vec::new());
        for (p, e) in &self.primes {
            if *e > 0 {
                num.push((*p, *e as u32));
            } else {
                den.push((*p, (-e) as u32));
            }
        }
        (unfactor(&num, self.unit), unfactor(&den, 0))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.to_fraction();
        if d == EisInt::ONE {
            write!(f, "{n}")
        } else {
            write!(f, "({n})/({d})")
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Factor {
    prime: EisInt,
    exponent: i64,
}

/// The factored form travels with the printed value so that reading an
/// element back never refactors a large norm.
#[derive(Serialize, Deserialize)]
struct Repr {
    value: String,
    unit: u8,
    factors: Vec<Factor>,
}

impl Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr {
            value: self.to_string(),
            unit: self.unit,
            factors: self.primes.iter().map(|(p, e)| Factor { prime: p.value(), exponent: *e }).collect(),
        }
        .serialize(s)
    }
}

impl FieldElem {
    fn from_repr(r: Repr) -> Result<Self> {
        if r.unit >= 6 {
            return Err(Error::Parse(format!("unit index {} out of range", r.unit)));
        }
        let mut primes = BTreeMap::new();
        for f in r.factors {
            let p = EisPrime::new(f.prime)?;
            if p.value() != f.prime || f.exponent == 0 || primes.insert(p, f.exponent).is_some() {
                return Err(Error::Parse(format!("factor {} is not in normal form", f.prime)));
            }
        }
        let x = FieldElem { unit: r.unit, primes };
        if x.to_string() != r.value {
            return Err(Error::Parse(format!("value {} does not match its factors", r.value)));
        }
        Ok(x)
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FieldElem::from_repr(Repr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<EisInt> for FieldElem {
    type Error = Error;
    fn try_from(x: EisInt) -> Result<Self> {
        FieldElem::from_eis(&x)
    }
}
