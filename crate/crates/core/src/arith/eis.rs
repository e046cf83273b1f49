//! The Eisenstein integers ℤ[ω], ω² + ω + 1 = 0.
//!
//! Elements are stored as `a + bω` with `i128` coordinates. Every product
//! is overflow-checked; the norm caps used by factorization keep desk-scale
//! work far from the limit.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on norms handed to [`factor`].
pub const DEFAULT_NORM_CAP: u128 = 1_000_000_000_000;

/// An element `a + bω` of ℤ[ω].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct EisInt {
    pub a: i128,
    pub b: i128,
}

impl EisInt {
    pub const ZERO: EisInt = EisInt { a: 0, b: 0 };
    pub const ONE: EisInt = EisInt { a: 1, b: 0 };
    pub const OMEGA: EisInt = EisInt { a: 0, b: 1 };
    /// The ramified prime 1 − ω above 3.
    pub const LAMBDA: EisInt = EisInt { a: 1, b: -1 };

    pub const fn new(a: i128, b: i128) -> Self {
        EisInt { a, b }
    }

    pub const fn from_int(a: i128) -> Self {
        EisInt { a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// N(a + bω) = a² − ab + b².
    pub fn norm(&self) -> u128 {
        let (a, b) = (self.a, self.b);
        let n = a
            .checked_mul(a)
            .and_then(|aa| aa.checked_sub(a.checked_mul(b)?))
            .and_then(|s| s.checked_add(b.checked_mul(b)?))
            .expect("Eisenstein norm overflow");
        n as u128
    }

    /// Complex conjugation ω ↦ ω².
    pub fn conj(&self) -> Self {
        EisInt::new(self.a - self.b, -self.b)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        let ac = self.a.checked_mul(rhs.a)?;
        let bd = self.b.checked_mul(rhs.b)?;
        let ad = self.a.checked_mul(rhs.b)?;
        let bc = self.b.checked_mul(rhs.a)?;
        Some(EisInt::new(
            ac.checked_sub(bd)?,
            ad.checked_add(bc)?.checked_sub(bd)?,
        ))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = *self;
        let mut acc = EisInt::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }

    /// Exact quotient `self / d`, if `d` divides `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm() as i128;
        let t = self.checked_mul(&d.conj())?;
        if t.a % n == 0 && t.b % n == 0 {
            Some(EisInt::new(t.a / n, t.b / n))
        } else {
            None
        }
    }

    pub fn divides(&self, x: &Self) -> bool {
        x.div_exact(self).is_some()
    }

    /// Euclidean division with nearest rounding: `self = q·d + r`, N(r) < N(d).
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let n = d.norm() as i128;
        let t = *self * d.conj();
        let q = EisInt::new(round_div(t.a, n), round_div(t.b, n));
        let r = *self - q * *d;
        (q, r)
    }

    pub fn gcd(mut x: Self, mut y: Self) -> Self {
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x
    }

    /// The unit `(1 + ω)^k`, a primitive sixth root of unity raised to `k`.
    pub fn unit(k: u8) -> Self {
        const UNITS: [EisInt; 6] = [
            EisInt::new(1, 0),
            EisInt::new(1, 1),
            EisInt::new(0, 1),
            EisInt::new(-1, 0),
            EisInt::new(-1, -1),
            EisInt::new(0, -1),
        ];
        UNITS[(k % 6) as usize]
    }

    /// Index `k` with `self = (1 + ω)^k`, if `self` is a unit.
    pub fn unit_index(&self) -> Option<u8> {
        (0..6).find(|&k| EisInt::unit(k) == *self)
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    /// Whether the element is primary: `a ≡ 2`, `b ≡ 0 (mod 3)`.
    pub fn is_primary(&self) -> bool {
        self.a.rem_euclid(3) == 2 && self.b.rem_euclid(3) == 0
    }

    /// The unit-normalized associate and the unit `(1+ω)^k` with
    /// `self = (1+ω)^k · normalized`.
    ///
    /// Elements prime to 3 normalize to their primary associate; the ramified
    /// prime normalizes to 1 − ω. Other elements divisible by 1 − ω are
    /// returned unchanged with `k = 0`.
    pub fn normalize(&self) -> (Self, u8) {
        if self.is_zero() {
            return (*self, 0);
        }
        if self.is_unit() {
            return (EisInt::ONE, self.unit_index().unwrap());
        }
        for k in 0..6u8 {
            let cand = *self * EisInt::unit((6 - k) % 6);
            let ok = if self.norm() == 3 {
                cand == EisInt::LAMBDA
            } else {
                cand.is_primary()
            };
            if ok {
                return (cand, k);
            }
        }
        (*self, 0)
    }
}

fn round_div(x: i128, n: i128) -> i128 {
    // nearest integer to x / n, n > 0
    let q = x.div_euclid(n);
    let r = x.rem_euclid(n);
    if 2 * r > n {
        q + 1
    } else {
        q
    }
}

impl std::ops::Add for EisInt {
    type Output = EisInt;
    fn add(self, rhs: Self) -> Self {
        EisInt::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl std::ops::Sub for EisInt {
    type Output = EisInt;
    fn sub(self, rhs: Self) -> Self {
        EisInt::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl std::ops::Neg for EisInt {
    type Output = EisInt;
    fn neg(self) -> Self {
        EisInt::new(-self.a, -self.b)
    }
}

impl std::ops::Mul for EisInt {
    type Output = EisInt;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("Eisenstein product overflow")
    }
}

impl fmt::Display for EisInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.a, self.b);
        let w = match b {
            1 => "w".to_string(),
            -1 => "-w".to_string(),
            _ => format!("{b}w"),
        };
        match (a, b) {
            (_, 0) => write!(f, "{a}"),
            (0, _) => write!(f, "{w}"),
            (_, b) if b > 0 => write!(f, "{a}+{w}"),
            _ => write!(f, "{a}{w}"),
        }
    }
}

impl FromStr for EisInt {
    type Err = Error;

    /// Parses forms like `3+w`, `2-w`, `-1-2w`, `w`, `5`, `4+3*w`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        if s.is_empty() {
            return Err(Error::Parse("empty Eisenstein integer".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, c) in s.char_indices() {
            if (c == '+' || c == '-') && i > 0 {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let (mut a, mut b) = (0i128, 0i128);
        for t in terms {
            let t = t.strip_prefix('+').unwrap_or(t);
            if let Some(coef) = t.strip_suffix('w') {
                let c = match coef {
                    "" => 1,
                    "-" => -1,
                    c => c
                        .parse::<i128>()
                        .map_err(|_| Error::Parse(format!("bad coefficient in {s:?}")))?,
                };
                b += c;
            } else {
                a += t
                    .parse::<i128>()
                    .map_err(|_| Error::Parse(format!("bad term {t:?} in {s:?}")))?;
            }
        }
        Ok(EisInt::new(a, b))
    }
}

impl Serialize for EisInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EisInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A unit-normalized prime of ℤ[ω].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EisPrime(EisInt);

impl EisPrime {
    /// Wraps `x` after checking it is irreducible; the stored value is the
    /// normalized associate.
    pub fn new(x: EisInt) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::Zero);
        }
        let (n, _) = x.normalize();
        if !is_irreducible(&n) {
            return Err(Error::Invalid(format!("{x} is not an Eisenstein prime")));
        }
        Ok(EisPrime(n))
    }

    pub(crate) fn new_unchecked(x: EisInt) -> Self {
        EisPrime(x)
    }

    pub fn lambda() -> Self {
        EisPrime(EisInt::LAMBDA)
    }

    pub fn value(&self) -> EisInt {
        self.0
    }

    pub fn norm(&self) -> u64 {
        self.0.norm() as u64
    }

    /// Residue characteristic.
    pub fn characteristic(&self) -> u64 {
        let n = self.norm();
        if n == 3 {
            3
        } else if self.0.b == 0 {
            self.0.a.unsigned_abs() as u64
        } else {
            n
        }
    }

    /// Residue degree f, with q = p^f.
    pub fn degree(&self) -> u32 {
        if self.norm() == self.characteristic() {
            1
        } else {
            2
        }
    }

    pub fn is_lambda(&self) -> bool {
        self.0 == EisInt::LAMBDA
    }

    /// The conjugate prime, normalized.
    pub fn conj(&self) -> Self {
        EisPrime(self.0.conj().normalize().0)
    }
}

impl Ord for EisPrime {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.norm(), self.0.a, self.0.b).cmp(&(other.norm(), other.0.a, other.0.b))
    }
}

impl PartialOrd for EisPrime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EisPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn is_irreducible(x: &EisInt) -> bool {
    let n = x.norm() as u64;
    if n < 2 {
        return false;
    }
    if is_prime_u64(n) {
        return true;
    }
    // inert rational primes: norm p² with p ≡ 2 mod 3
    let r = isqrt(n);
    r * r == n && is_prime_u64(r) && r % 3 == 2
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = 17;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Trial-division factorization of a rational integer.
pub fn factor_u128(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The primary prime of norm `p` for a rational prime `p ≡ 1 (mod 3)`,
/// found as gcd(p, r − ω) with r a primitive cube root of unity mod p.
pub fn split_prime_above(p: u64) -> EisPrime {
    debug_assert!(p % 3 == 1);
    let r = (2..p)
        .map(|g| powmod(g, (p - 1) / 3, p))
        .find(|&r| r != 1)
        .expect("p ≡ 1 mod 3 has a primitive cube root of unity");
    let g = EisInt::gcd(EisInt::from_int(p as i128), EisInt::new(r as i128, -1));
    let (n, _) = g.normalize();
    debug_assert_eq!(n.norm(), p as u128);
    EisPrime(n)
}

/// Both primes above a split rational prime, in place order.
pub fn primes_above_split(p: u64) -> [EisPrime; 2] {
    let a = split_prime_above(p);
    let b = a.conj();
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// The primes of ℤ[ω] above a rational prime.
pub fn primes_above(p: u64) -> Result<Vec<EisPrime>> {
    if !is_prime_u64(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    Ok(match p % 3 {
        0 => vec![EisPrime::lambda()],
        1 => primes_above_split(p).to_vec(),
        _ => vec![EisPrime(EisInt::from_int(p as i128).normalize().0)],
    })
}

/// Factorization of a nonzero Eisenstein integer: normalized primes with
/// exponents (sorted by norm, then coordinates) and the unit index `k` with
/// `x = (1+ω)^k · ∏ πᵢ^eᵢ`.
pub fn factor(x: &EisInt) -> Result<(Vec<(EisPrime, u32)>, u8)> {
    factor_with_cap(x, DEFAULT_NORM_CAP)
}

pub fn factor_with_cap(x: &EisInt, cap: u128) -> Result<(Vec<(EisPrime, u32)>, u8)> {
    if x.is_zero() {
        return Err(Error::Zero);
    }
    let norm = x.norm();
    if norm > cap {
        return Err(Error::NormCap { norm, cap });
    }
    let mut rest = *x;
    let mut out: Vec<(EisPrime, u32)> = Vec::new();
    let take = |rest: &mut EisInt, pi: EisPrime, out: &mut Vec<(EisPrime, u32)>| {
        let mut e = 0;
        while let Some(q) = rest.div_exact(&pi.value()) {
            *rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((pi, e));
        }
    };
    for (p, _) in factor_u128(norm) {
        let p = p as u64;
        if p == 3 {
            take(&mut rest, EisPrime::lambda(), &mut out);
        } else if p % 3 == 2 {
            take(&mut rest, EisPrime(EisInt::from_int(p as i128)), &mut out);
        } else {
            for pi in primes_above_split(p) {
                take(&mut rest, pi, &mut out);
            }
        }
    }
    let k = rest
        .unit_index()
        .expect("cofactor after removing all primes must be a unit");
    out.sort_by_key(|a| a.0);
    Ok((out, k))
}

/// Multiplies back a factorization.
pub fn unfactor(primes: &[(EisPrime, u32)], unit: u8) -> EisInt {
    primes
        .iter()
        .fold(EisInt::unit(unit), |acc, (p, e)| acc * p.value().pow(*e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> EisInt {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3+w", "2-w", "-1-2w", "w", "-w", "5", "0", "12+24w"] {
            assert_eq!(e(s).to_string(), s);
        }
        assert_eq!(e("4 + 3*w"), EisInt::new(4, 3));
        assert!("x+1".parse::<EisInt>().is_err());
    }

    #[test]
    fn seven_splits_into_three_plus_omega_and_two_minus_omega() {
        // N(3+ω) = 9 − 3 + 1 = 7, N(2−ω) = 4 + 2 + 1 = 7
        assert_eq!(e("3+w").norm(), 7);
        assert_eq!(e("2-w").norm(), 7);
        assert_eq!(e("3+w") * e("2-w"), e("7"));
        let (f, u) = factor(&e("7")).unwrap();
        assert_eq!(u, 0);
        assert_eq!(f.len(), 2);
        // both primes are associates of 3+ω and 2−ω
        let vals: Vec<EisInt> = f.iter().map(|(p, _)| p.value()).collect();
        assert!(vals.iter().any(|v| e("3+w").div_exact(v).is_some_and(|q| q.is_unit())));
        assert!(vals.iter().any(|v| e("2-w").div_exact(v).is_some_and(|q| q.is_unit())));
        assert_eq!(unfactor(&f, u), e("7"));
    }

    #[test]
    fn two_is_inert() {
        // no element of norm 2: a² − ab + b² = 2 has no solutions
        for a in -3i128..=3 {
            for b in -3i128..=3 {
                assert_ne!(EisInt::new(a, b).norm(), 2);
            }
        }
        let (f, u) = factor(&e("2")).unwrap();
        assert_eq!(f, vec![(EisPrime::new(e("2")).unwrap(), 1)]);
        assert_eq!(u, 0);
        assert_eq!(f[0].0.norm(), 4);
    }

    #[test]
    fn unit_factors_to_empty_list() {
        let (f, u) = factor(&EisInt::ONE).unwrap();
        assert!(f.is_empty());
        assert_eq!(u, 0);
        assert!(factor(&EisInt::ZERO).is_err());
    }

    #[test]
    fn three_is_unit_times_lambda_squared() {
        let (f, u) = factor(&e("3")).unwrap();
        assert_eq!(f, vec![(EisPrime::lambda(), 2)]);
        assert_eq!(EisInt::unit(u) * EisInt::LAMBDA.pow(2), e("3"));
    }

    #[test]
    fn units_are_the_six_roots_of_unity() {
        for k in 0..6 {
            let u = EisInt::unit(k);
            assert_eq!(u.norm(), 1);
            assert_eq!(u.pow(6), EisInt::ONE);
            assert_eq!(u.unit_index(), Some(k));
        }
        assert_eq!(EisInt::unit(2), EisInt::OMEGA);
        assert_eq!(EisInt::unit(3), -EisInt::ONE);
    }

    #[test]
    fn normalization_picks_a_single_associate() {
        let x = e("3+w");
        let reps: Vec<EisInt> = (0..6).map(|k| (x * EisInt::unit(k)).normalize().0).collect();
        assert!(reps.iter().all(|r| *r == reps[0]));
        assert!(reps[0].is_primary());
        assert_eq!(EisInt::LAMBDA.conj().normalize().0, EisInt::LAMBDA);
    }

    #[test]
    fn splitting_law_below_ten_thousand() {
        for p in 2u64..10_000 {
            if !is_prime_u64(p) {
                continue;
            }
            let (f, _) = factor(&EisInt::from_int(p as i128)).unwrap();
            match p % 3 {
                0 => assert_eq!(f, vec![(EisPrime::lambda(), 2)]),
                1 => {
                    assert_eq!(f.len(), 2, "p = {p}");
                    assert_ne!(f[0].0, f[1].0);
                    assert!(f.iter().all(|(q, e)| q.norm() == p && *e == 1));
                }
                _ => assert_eq!(f.len(), 1),
            }
            let above: Vec<EisPrime> = f.iter().map(|(q, _)| *q).collect();
            let mut listed = primes_above(p).unwrap();
            listed.sort();
            assert_eq!(listed, above, "p = {p}");
        }
        assert!(primes_above(9).is_err());
    }
}
