//! Reductions of catalog curves at good places: naive point counts and
//! group structure.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::curve::Curve;
use crate::arith::eis::factor_u128;
use crate::arith::{Fq, ResidueField};
use crate::error::{Error, Result};

/// Default cap on residue field sizes for naive counting.
pub const DEFAULT_COUNT_CAP: u64 = 2_000_000;

type Pt = Option<(Fq, Fq)>;

#[derive(Clone, Debug)]
pub struct ReducedCurve {
    pub field: ResidueField,
    pub a2: Fq,
    pub a4: Fq,
    pub a6: Fq,
    pub count: u64,
}

/// Invariant factors `(d₁, d₂)` of E(F_q) with `d₁ | d₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStructure {
    pub d1: u64,
    pub d2: u64,
}

impl ReducedCurve {
    /// Reduces `curve` into `field` and counts points by running over x.
    /// The caller is responsible for checking that the place is good.
    pub fn new(curve: &Curve, field: ResidueField, cap: u64) -> Result<Self> {
        let q = field.q();
        if q > cap {
            return Err(Error::CountingCap { q, cap });
        }
        let red = |c: &super::qomega::QOmega| {
            c.reduce(&field)
                .ok_or_else(|| Error::BadPlace("coefficient denominator".into()))
        };
        let (a2, a4, a6) = (red(&curve.a2)?, red(&curve.a4)?, red(&curve.a6)?);
        let mut r = ReducedCurve { field, a2, a4, a6, count: 0 };
        if r.field.characteristic() == 2 {
            return Err(Error::BadPlace("characteristic 2".into()));
        }
        let disc = r.cubic_discriminant();
        if r.field.is_zero(disc) {
            return Err(Error::BadPlace("discriminant vanishes".into()));
        }
        let mut n = 1u64;
        for x in r.field.elements() {
            n += (1 + r.field.legendre(r.rhs(x))) as u64;
        }
        r.count = n;
        Ok(r)
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    fn rhs(&self, x: Fq) -> Fq {
        let f = &self.field;
        let t = f.add(f.mul(f.add(x, self.a2), x), self.a4);
        f.add(f.mul(t, x), self.a6)
    }

    fn cubic_discriminant(&self) -> Fq {
        let f = &self.field;
        let (b, c, d) = (self.a2, self.a4, self.a6);
        let k = |n: i128| f.from_int(n);
        let b2 = f.square(b);
        let c2 = f.square(c);
        let terms = [
            f.mul(b2, c2),
            f.neg(f.mul(k(4), f.mul(c2, c))),
            f.neg(f.mul(k(4), f.mul(f.mul(b2, b), d))),
            f.neg(f.mul(k(27), f.square(d))),
            f.mul(k(18), f.mul(f.mul(b, c), d)),
        ];
        terms.into_iter().fold(f.zero(), |acc, t| f.add(acc, t))
    }

    pub fn contains(&self, p: &Pt) -> bool {
        match p {
            None => true,
            Some((x, y)) => self.field.square(*y) == self.rhs(*x),
        }
    }

    pub fn neg(&self, p: &Pt) -> Pt {
        p.map(|(x, y)| (x, self.field.neg(y)))
    }

    pub fn add(&self, p: &Pt, q: &Pt) -> Pt {
        let f = &self.field;
        let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
            return if p.is_none() { *q } else { *p };
        };
        let slope = if x1 == x2 {
            if f.is_zero(f.add(*y1, *y2)) {
                return None;
            }
            let num = f.add(
                f.add(f.mul(f.from_int(3), f.square(*x1)), f.mul(f.from_int(2), f.mul(self.a2, *x1))),
                self.a4,
            );
            f.mul(num, f.inv(f.mul(f.from_int(2), *y1)).unwrap())
        } else {
            f.mul(f.sub(*y2, *y1), f.inv(f.sub(*x2, *x1)).unwrap())
        };
        let x3 = f.sub(f.sub(f.sub(f.square(slope), self.a2), *x1), *x2);
        let y3 = f.sub(f.mul(slope, f.sub(*x1, x3)), *y1);
        Some((x3, y3))
    }

    pub fn mul(&self, mut k: u64, p: &Pt) -> Pt {
        let mut acc = None;
        let mut base = *p;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Points in a fixed order: increasing x index, then the two roots.
    pub fn points(&self) -> impl Iterator<Item = Pt> + '_ {
        std::iter::once(None).chain(self.field.elements().flat_map(move |x| {
            let y = self.field.sqrt(self.rhs(x));
            let mut out = Vec::new();
            if let Some(y) = y {
                out.push(Some((x, y)));
                if !self.field.is_zero(y) {
                    out.push(Some((x, self.field.neg(y))));
                }
            }
            out
        }))
    }

    /// Order of a point, given that it divides `n`.
    fn order_dividing(&self, p: &Pt, n: u64) -> u64 {
        let mut ord = n;
        for (l, _) in factor_u128(n as u128) {
            let l = l as u64;
            while ord.is_multiple_of(l) && self.mul(ord / l, p).is_none() {
                ord /= l;
            }
        }
        ord
    }

    /// Invariant factors, assembled prime by prime. The ℓ-part is cyclic
    /// unless ℓ² | N and ℓ | q − 1; otherwise the ℓ-primary subgroup is
    /// enumerated by closing images of points under multiplication by the
    /// prime-to-ℓ part of N.
    pub fn group_structure(&self) -> Result<GroupStructure> {
        let n = self.count;
        let q1 = self.q() - 1;
        let mut d1 = 1u64;
        for (l, e) in factor_u128(n as u128) {
            let l = l as u64;
            if e < 2 || !q1.is_multiple_of(l) {
                continue;
            }
            let le = l.pow(e);
            if le > DEFAULT_COUNT_CAP {
                return Err(Error::CountingCap { q: le, cap: DEFAULT_COUNT_CAP });
            }
            let cofactor = n / le;
            let mut sub: HashSet<Pt> = HashSet::from([None]);
            for p in self.points() {
                if sub.len() as u64 == le {
                    break;
                }
                let g = self.mul(cofactor, &p);
                if sub.contains(&g) {
                    continue;
                }
                // H ← H + ⟨g⟩
                let base: Vec<Pt> = sub.iter().copied().collect();
                let mut step = g;
                while !sub.contains(&step) {
                    for h in &base {
                        sub.insert(self.add(h, &step));
                    }
                    step = self.add(&step, &g);
                }
            }
            let exp = sub.iter().map(|p| self.order_dividing(p, le)).max().unwrap_or(1);
            d1 *= le / exp;
        }
        Ok(GroupStructure { d1, d2: n / d1 })
    }

    /// Invariant factors from the orders of all points; exhaustive.
    pub fn group_structure_exhaustive(&self) -> GroupStructure {
        let n = self.count;
        let exp = self
            .points()
            .map(|p| self.order_dividing(&p, n))
            .fold(1u64, num_integer::lcm);
        GroupStructure { d1: n / exp, d2: exp }
    }
}
