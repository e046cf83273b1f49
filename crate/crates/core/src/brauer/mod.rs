//! Brauer classes recorded by their local invariants.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{FieldId, Place};
use crate::error::{Error, Result};

/// An element k/n of (1/n)ℤ/ℤ, kept in lowest terms with 0 ≤ k < n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalInvariant {
    k: u64,
    n: u64,
}

impl LocalInvariant {
    pub fn new(k: i64, n: u64) -> Self {
        assert!(n > 0, "zero denominator");
        let k = k.rem_euclid(n as i64) as u64;
        let g = k.gcd(&n);
        if k == 0 {
            return LocalInvariant { k: 0, n: 1 };
        }
        LocalInvariant { k: k / g, n: n / g }
    }

    pub fn zero() -> Self {
        LocalInvariant { k: 0, n: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.k
    }

    pub fn denominator(&self) -> u64 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0
    }

    /// Order in ℚ/ℤ.
    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.n.lcm(&o.n);
        let k = self.k * (n / self.n) + o.k * (n / o.n);
        LocalInvariant::new((k % n) as i64, n)
    }

    pub fn neg(&self) -> Self {
        LocalInvariant::new(-(self.k as i64), self.n)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, m: i64) -> Self {
        let k = (self.k as i128 * m as i128).rem_euclid(self.n as i128);
        LocalInvariant::new(k as i64, self.n)
    }

    /// The numerator over a fixed denominator `n` that the order divides.
    pub fn over(&self, n: u64) -> Option<u64> {
        n.is_multiple_of(self.n).then(|| self.k * (n / self.n))
    }
}

impl fmt::Display for LocalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            f.write_str("0")
        } else {
            write!(f, "{}/{}", self.k, self.n)
        }
    }
}

/// A Brauer class as a finitely supported vector of local invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerClass {
    pub field: FieldId,
    support: BTreeMap<Place, LocalInvariant>,
    /// Set when the class comes from a global computation and has passed the
    /// reciprocity check.
    pub global: bool,
}

impl BrauerClass {
    pub fn zero(field: FieldId) -> Self {
        BrauerClass { field, support: BTreeMap::new(), global: true }
    }

    /// A class from local data, zeros pruned; not marked global.
    pub fn local(field: FieldId, entries: impl IntoIterator<Item = (Place, LocalInvariant)>) -> Self {
        let mut c = BrauerClass { field, support: BTreeMap::new(), global: false };
        for (v, x) in entries {
            c.add_at(v, x);
        }
        c
    }

    /// A global class: the entries must satisfy reciprocity.
    pub fn global(field: FieldId, entries: impl IntoIterator<Item = (Place, LocalInvariant)>) -> Result<Self> {
        let mut c = Self::local(field, entries);
        if !c.reciprocity_check() {
            return Err(Error::Reciprocity(c.invariant_sum().to_string()));
        }
        c.global = true;
        Ok(c)
    }

    fn add_at(&mut self, v: Place, x: LocalInvariant) {
        let cur = self.support.get(&v).copied().unwrap_or_else(LocalInvariant::zero);
        let s = cur.add(&x);
        if s.is_zero() {
            self.support.remove(&v);
        } else {
            self.support.insert(v, s);
        }
    }

    pub fn invariant(&self, v: &Place) -> LocalInvariant {
        self.support.get(v).copied().unwrap_or_else(LocalInvariant::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Place, &LocalInvariant)> {
        self.support.iter()
    }

    pub fn places(&self) -> Vec<Place> {
        self.support.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// lcm of the local orders.
    pub fn order(&self) -> u64 {
        self.support.values().fold(1, |acc, x| acc.lcm(&x.order()))
    }

    pub fn invariant_sum(&self) -> LocalInvariant {
        self.support
            .values()
            .fold(LocalInvariant::zero(), |acc, x| acc.add(x))
    }

    pub fn reciprocity_check(&self) -> bool {
        self.invariant_sum().is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = self.clone();
        for (v, x) in &o.support {
            c.add_at(*v, *x);
        }
        c.global = self.global && o.global;
        c
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, m: i64) -> Self {
        let mut c = BrauerClass { field: self.field, support: BTreeMap::new(), global: self.global };
        for (v, x) in &self.support {
            c.add_at(*v, x.scale(m));
        }
        c
    }

    /// Restriction along an extension with the given local degrees: each
    /// invariant is multiplied by the degree at its place.
    pub fn restrict(&self, local_degrees: &BTreeMap<Place, u64>) -> Result<Self> {
        let mut c = BrauerClass { field: self.field, support: BTreeMap::new(), global: self.global };
        for (v, x) in &self.support {
            let d = local_degrees
                .get(v)
                .ok_or_else(|| Error::MissingPlace(v.to_string()))?;
            c.add_at(*v, x.scale(*d as i64));
        }
        Ok(c)
    }

    /// The local component at `v` as a class of its own.
    pub fn at(&self, v: &Place) -> Self {
        Self::local(self.field, [(*v, self.invariant(v))])
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    place: Place,
    k: u64,
    n: u64,
}

#[derive(Serialize, Deserialize)]
struct Repr {
    field: FieldId,
    support: Vec<Entry>,
}

impl Serialize for BrauerClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr {
            field: self.field,
            support: self
                .support
                .iter()
                .map(|(v, x)| Entry { place: *v, k: x.k, n: x.n })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BrauerClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        let entries = r
            .support
            .into_iter()
            .map(|e| (e.place, LocalInvariant::new(e.k as i64, e.n.max(1))));
        let c = BrauerClass::local(r.field, entries);
        let global = c.reciprocity_check();
        Ok(BrauerClass { global, ..c })
    }
}

impl fmt::Display for BrauerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.support.iter().map(|(v, x)| format!("{v}: {x}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn places() -> Vec<Place> {
        ["(2+3w)", "(-1+3w)", "(2)", "(5)", "(1-w)"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    fn cls(entries: &[(usize, i64, u64)]) -> BrauerClass {
        let ps = places();
        BrauerClass::local(
            FieldId::Eisenstein,
            entries.iter().map(|(i, k, n)| (ps[*i], LocalInvariant::new(*k, *n))),
        )
    }

    #[test]
    fn orders() {
        assert_eq!(cls(&[]).order(), 1);
        assert_eq!(cls(&[(0, 1, 3), (1, 2, 3)]).order(), 3);
        assert_eq!(cls(&[(0, 1, 2), (1, 1, 3), (2, 1, 6)]).order(), 6);
    }

    #[test]
    fn reciprocity() {
        assert!(cls(&[(0, 1, 3), (1, 2, 3)]).reciprocity_check());
        assert!(!cls(&[(0, 1, 3)]).reciprocity_check());
        assert!(cls(&[]).reciprocity_check());
        // a single nonzero invariant can never be global
        let ps = places();
        assert!(BrauerClass::global(FieldId::Eisenstein, [(ps[0], LocalInvariant::new(1, 3))]).is_err());
    }

    #[test]
    fn restriction_scales_by_degree() {
        let v = places()[0];
        let c = cls(&[(0, 1, 3)]);
        assert!(c.restrict(&BTreeMap::from([(v, 3)])).unwrap().is_zero());
        assert_eq!(c.restrict(&BTreeMap::from([(v, 2)])).unwrap(), cls(&[(0, 2, 3)]));
        assert!(cls(&[]).restrict(&BTreeMap::new()).unwrap().is_zero());
        assert!(matches!(c.restrict(&BTreeMap::new()), Err(Error::MissingPlace(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = cls(&[(0, 1, 3), (1, 2, 3)]);
        let s = serde_json::to_string(&c).unwrap();
        let back: BrauerClass = serde_json::from_str(&s).unwrap();
        assert_eq!(back.places(), c.places());
        assert_eq!(back.invariant(&places()[1]), LocalInvariant::new(2, 3));
    }

    fn arb_class() -> impl Strategy<Value = BrauerClass> {
        prop::collection::vec((0usize..5, 0i64..6, prop::sample::select(vec![1u64, 2, 3, 6, 9])), 0..5)
            .prop_map(|v| cls(&v))
    }

    proptest! {
        #[test]
        fn torsion_group_laws(a in arb_class(), b in arb_class()) {
            prop_assert_eq!(a.order() % a.add(&a).order(), 0);
            prop_assert!(a.add(&a.neg()).is_zero());
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        }

        #[test]
        fn restriction_is_additive(a in arb_class(), b in arb_class(), d in prop::collection::vec(1u64..5, 5)) {
            let degs: BTreeMap<Place, u64> = places().into_iter().zip(d).collect();
            let lhs = a.add(&b).restrict(&degs).unwrap();
            let rhs = a.restrict(&degs).unwrap().add(&b.restrict(&degs).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
