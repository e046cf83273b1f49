//! Curves `y² = x³ + a₂x² + a₄x + a₆` over ℚ or ℚ(ω) and their rational
//! points.

use serde::{Deserialize, Serialize};

use super::qomega::QOmega;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub a2: QOmega,
    pub a4: QOmega,
    pub a6: QOmega,
}

/// A point in affine coordinates, or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine(QOmega, QOmega),
}

impl Point {
    pub fn affine(x: &str, y: &str) -> Result<Self> {
        Ok(Point::Affine(x.parse()?, y.parse()?))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn coords(&self) -> Option<(&QOmega, &QOmega)> {
        match self {
            Point::Affine(x, y) => Some((x, y)),
            Point::Infinity => None,
        }
    }

    /// Galois conjugate, ω ↦ ω².
    pub fn conj(&self) -> Self {
        match self {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.conj(), y.conj()),
        }
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Infinity => f.write_str("O"),
            Point::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Infinity => s.serialize_str("O"),
            Point::Affine(x, y) => [x.to_string(), y.to_string()].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Inf(String),
            Pair([String; 2]),
        }
        match Repr::deserialize(d)? {
            Repr::Inf(s) if s == "O" => Ok(Point::Infinity),
            Repr::Inf(s) => Err(serde::de::Error::custom(format!("bad point {s:?}"))),
            Repr::Pair([x, y]) => Point::affine(&x, &y).map_err(serde::de::Error::custom),
        }
    }
}

impl Curve {
    pub fn short(a4: QOmega, a6: QOmega) -> Self {
        Curve { a2: QOmega::zero(), a4, a6 }
    }

    /// `y² = (x − e₁)(x − e₂)(x − e₃)`.
    pub fn from_roots(e1: i128, e2: i128, e3: i128) -> Self {
        Curve {
            a2: QOmega::from_int(-(e1 + e2 + e3)),
            a4: QOmega::from_int(e1 * e2 + e1 * e3 + e2 * e3),
            a6: QOmega::from_int(-e1 * e2 * e3),
        }
    }

    /// Right-hand side `x³ + a₂x² + a₄x + a₆`.
    pub fn rhs(&self, x: &QOmega) -> QOmega {
        x.add(&self.a2).mul(x).add(&self.a4).mul(x).add(&self.a6)
    }

    /// Discriminant of the cubic; the curve discriminant is 16 times this.
    pub fn cubic_discriminant(&self) -> QOmega {
        let (b, c, d) = (&self.a2, &self.a4, &self.a6);
        // b²c² − 4c³ − 4b³d − 27d² + 18bcd
        b.square()
            .mul(&c.square())
            .sub(&c.pow(3).scale(4))
            .sub(&b.pow(3).mul(d).scale(4))
            .sub(&d.square().scale(27))
            .add(&b.mul(c).mul(d).scale(18))
    }

    pub fn discriminant(&self) -> QOmega {
        self.cubic_discriminant().scale(16)
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => y.square() == self.rhs(x),
        }
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), y.neg()),
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (Point::Affine(x1, y1), Point::Affine(x2, y2)) = (p, q) else {
            return if p.is_infinity() { q.clone() } else { p.clone() };
        };
        let slope = if x1 == x2 {
            if y1.add(y2).is_zero() {
                return Point::Infinity;
            }
            // tangent slope (3x² + 2a₂x + a₄)/(2y)
            let num = x1.square().scale(3).add(&self.a2.mul(x1).scale(2)).add(&self.a4);
            num.div(&y1.scale(2)).expect("nonzero y")
        } else {
            y2.sub(y1).div(&x2.sub(x1)).expect("distinct x")
        };
        let x3 = slope.square().sub(&self.a2).sub(x1).sub(x2);
        let y3 = slope.mul(&x1.sub(&x3)).sub(y1);
        Point::Affine(x3, y3)
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Point {
        self.add(p, &self.neg(q))
    }

    pub fn mul(&self, k: i64, p: &Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = if k < 0 { self.neg(p) } else { p.clone() };
        let mut k = k.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Tangent slope at an affine point with y ≠ 0.
    pub fn tangent_slope(&self, x: &QOmega, y: &QOmega) -> Result<QOmega> {
        let num = x.square().scale(3).add(&self.a2.mul(x).scale(2)).add(&self.a4);
        num.div(&y.scale(2))
    }

    /// A function with divisor `n(P) − n(O)` for a point `P` of exact order
    /// `n ∈ {2, 3}`, evaluated at `Q`.
    ///
    /// For n = 2 this is the vertical line `x − x_P`, for n = 3 the tangent at
    /// the flex `P`. Both are monic at O with respect to the uniformizer x/y.
    /// At `Q = P` the value is the leading coefficient in the uniformizer
    /// `x − x_P` (n = 3) or `y` (n = 2); at O it is 1.
    pub fn line_function(&self, n: u32, p: &Point, q: &Point) -> Result<QOmega> {
        let Point::Affine(xp, yp) = p else {
            return Err(Error::Invalid("line function through O".into()));
        };
        let Point::Affine(xq, yq) = q else {
            return Ok(QOmega::one());
        };
        match n {
            2 => {
                if q == p {
                    // x − x_P = y²/((x − e₂)(x − e₃)) + ...; leading term y²/f′(x_P)
                    let fp = xp.square().scale(3).add(&self.a2.mul(xp).scale(2)).add(&self.a4);
                    return fp.inv();
                }
                Ok(xq.sub(xp))
            }
            3 => {
                if yp.is_zero() {
                    return Err(Error::Invalid("flex with y = 0".into()));
                }
                if q == p {
                    // the line vanishes to order 3; y = y₀ + y₁t + t³/(2y₀) + …
                    return yp.scale(2).inv();
                }
                let s = self.tangent_slope(xp, yp)?;
                Ok(yq.sub(yp).sub(&s.mul(&xq.sub(xp))))
            }
            _ => Err(Error::Invalid(format!("line functions only for n in {{2, 3}}, got {n}"))),
        }
    }

    /// Weil pairing `e_n(P, Q) = (−1)^n f_P(Q)/f_Q(P)` for distinct points of
    /// order `n ∈ {2, 3}`.
    pub fn weil_pairing(&self, n: u32, p: &Point, q: &Point) -> Result<QOmega> {
        if p.is_infinity() || q.is_infinity() || p == q {
            return Ok(QOmega::one());
        }
        let num = self.line_function(n, p, q)?;
        let den = self.line_function(n, q, p)?;
        let v = num.div(&den)?;
        Ok(if n % 2 == 1 { v.neg() } else { v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermat() -> Curve {
        Curve::short(QOmega::zero(), QOmega::from_int(-432))
    }

    #[test]
    fn flexes_have_order_three() {
        let e = fermat();
        for (x, y) in [("0", "12+24w"), ("12", "36"), ("12w", "-36")] {
            let p = Point::affine(x, y).unwrap();
            assert!(e.contains(&p));
            assert_eq!(e.mul(3, &p), Point::Infinity);
            assert_ne!(e.mul(2, &p), Point::Infinity);
        }
    }

    #[test]
    fn group_law_is_associative_on_samples() {
        let e = Curve::from_roots(0, 1, -1);
        // y² = x³ − x has only torsion over ℚ; use a curve with a point of
        // infinite order instead: y² = x³ − 2, P = (3, 5)
        let c = Curve::short(QOmega::zero(), QOmega::from_int(-2));
        let p = Point::affine("3", "5").unwrap();
        let p2 = c.add(&p, &p);
        let p3 = c.add(&p2, &p);
        assert_eq!(c.add(&p, &p2), p3);
        assert_eq!(c.mul(3, &p), p3);
        assert!(c.contains(&p3));
        assert_eq!(c.sub(&p3, &p), p2);
        assert!(e.contains(&Point::affine("1", "0").unwrap()));
    }

    #[test]
    fn two_torsion_pairing_is_minus_one() {
        let e = Curve::from_roots(0, 1, -1);
        let s = Point::affine("0", "0").unwrap();
        let t = Point::affine("1", "0").unwrap();
        assert_eq!(e.weil_pairing(2, &s, &t).unwrap(), QOmega::from_int(-1));
    }

    #[test]
    fn discriminant_of_fermat_model() {
        // −16·27·432²
        assert_eq!(fermat().discriminant(), QOmega::from_int(-16 * 27 * 432 * 432));
    }
}
