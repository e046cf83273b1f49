//! The period-index obstruction at full level structure: Kummer classes as
//! pairs modulo n-th powers, the obstruction map Δ as the norm-residue
//! symbol, the Kummer image of rational points, the Lichtenbaum pairing,
//! level change, and the relative Brauer data of a class.

use serde::{Deserialize, Serialize};

use crate::arith::{EisPrime, FieldElem, FieldId, Place};
use crate::brauer::{BrauerClass, LocalInvariant};
use crate::elliptic::{curve as catalog_curve, CurveDatum, Point};
use crate::error::{Error, Result};
use crate::symbols::{local_symbol, symbol_global, symbol_local_tame, tame_symbol};

/// A class of H¹(K, E[n]) written as Φ(a, b), with a, b reduced modulo n-th
/// powers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KummerClass {
    pub curve_id: String,
    pub level: u32,
    pub a: FieldElem,
    pub b: FieldElem,
}

fn check_level(e: &CurveDatum, n: u32) -> Result<()> {
    if e.field != FieldId::Eisenstein || !n.is_multiple_of(e.level) || n.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "level {n} is not supported on {} (base level {})",
            e.id, e.level
        )));
    }
    Ok(())
}

/// Φ(a, b) at level `n` on the catalog curve `e`.
pub fn phi(a: &FieldElem, b: &FieldElem, n: u32, e: &CurveDatum) -> Result<KummerClass> {
    check_level(e, n)?;
    Ok(KummerClass {
        curve_id: e.id.clone(),
        level: n,
        a: a.reduce_mod_powers(n),
        b: b.reduce_mod_powers(n),
    })
}

pub fn phi_inv(xi: &KummerClass) -> (FieldElem, FieldElem) {
    (xi.a.clone(), xi.b.clone())
}

impl KummerClass {
    pub fn zero(e: &CurveDatum, n: u32) -> Result<Self> {
        phi(&FieldElem::one(), &FieldElem::one(), n, e)
    }

    pub fn curve(&self) -> Result<&'static CurveDatum> {
        catalog_curve(&self.curve_id)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_one() && self.b.is_one()
    }

    fn with(&self, a: FieldElem, b: FieldElem) -> Self {
        KummerClass {
            curve_id: self.curve_id.clone(),
            level: self.level,
            a: a.reduce_mod_powers(self.level),
            b: b.reduce_mod_powers(self.level),
        }
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        if self.curve_id != o.curve_id || self.level != o.level {
            return Err(Error::Invalid(format!(
                "classes on {} level {} and {} level {}",
                self.curve_id, self.level, o.curve_id, o.level
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        Ok(self.with(self.a.mul(&o.a), self.b.mul(&o.b)))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        Ok(self.with(self.a.div(&o.a), self.b.div(&o.b)))
    }

    pub fn scale(&self, m: i64) -> Self {
        self.with(self.a.pow(m), self.b.pow(m))
    }

    /// Places where either component has nonzero valuation.
    pub fn support(&self) -> Vec<EisPrime> {
        let mut v: Vec<EisPrime> = self.a.support().chain(self.b.support()).copied().collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Δ(ξ) = ⟨a, b⟩_n. At the base level this is a global class with its
/// component at 1 − ω computed by the wild evaluator; at higher levels there
/// is no global root of unity and only the tame components are returned,
/// which requires q ≡ 1 mod n at every support place.
pub fn delta(xi: &KummerClass) -> Result<BrauerClass> {
    let base = xi.curve()?.level;
    if xi.level == base && base == 3 {
        symbol_global(&xi.a, &xi.b, 3)
    } else {
        symbol_local_tame(&xi.a, &xi.b, xi.level as u64)
    }
}

/// The component of Δ(ξ) at a single place.
pub fn delta_at(xi: &KummerClass, v: &EisPrime) -> Result<LocalInvariant> {
    if xi.level == 3 {
        local_symbol(&xi.a, &xi.b, v, 3)
    } else {
        tame_symbol(&xi.a, &xi.b, v, xi.level as u64)
    }
}

/// Evaluates the flex tangent at −A on x, with the leading coefficient at
/// the zero and 1 at O.
fn descent_function(e: &CurveDatum, a: &Point, x: &Point) -> Result<FieldElem> {
    let neg = e.curve.neg(a);
    e.curve.line_function(3, &neg, x)?.to_field_elem()
}

/// The Kummer map E(K)/3E(K) → H¹(K, E[3]), x ↦ (f_{−S}(x), f_{−T}(x)).
pub fn iota(e: &CurveDatum, x: &Point) -> Result<KummerClass> {
    if e.level != 3 {
        return Err(Error::Invalid(format!("Kummer map implemented at level 3, not {}", e.level)));
    }
    if !e.curve.contains(x) {
        return Err(Error::Invalid(format!("{x} is not on {}", e.id)));
    }
    let fa = descent_function(e, &e.s, x)?;
    let fb = descent_function(e, &e.t, x)?;
    phi(&fa, &fb, 3, e)
}

/// Li(ξ, x) = Δ(ξ + ι(x)) − Δ(ξ) − Δ(ι(x)).
pub fn li_pairing(xi: &KummerClass, x: &Point) -> Result<BrauerClass> {
    let e = xi.curve()?;
    let ix = iota(e, x)?;
    Ok(delta(&xi.add(&ix)?)?.sub(&delta(xi)?).sub(&delta(&ix)?))
}

/// j_m: level n → level mn, (a, b) ↦ (a^m, b^m).
pub fn lift_level(xi: &KummerClass, m: u32) -> Result<KummerClass> {
    let e = xi.curve()?;
    let n = xi.level * m;
    check_level(e, n)?;
    Ok(KummerClass { level: n, ..xi.clone() }.with(xi.a.pow(m as i64), xi.b.pow(m as i64)))
}

/// [m]: level mn → level n, reduction of the pair.
pub fn push_level(eta: &KummerClass, m: u32) -> Result<KummerClass> {
    if m == 0 || !eta.level.is_multiple_of(m) {
        return Err(Error::Invalid(format!("level {} is not divisible by {m}", eta.level)));
    }
    let e = eta.curve()?;
    phi(&eta.a, &eta.b, eta.level / m, e)
}

/// Relative Brauer data of ξ: the subgroup κ⁰ spanned by Li(ξ, E(K)), the
/// class α = Δ(ξ), the order of α modulo κ⁰, and the least Δ-order over
/// the Kummer lifts ξ + ι(x).
#[derive(Clone, Debug, Serialize)]
pub struct RelativeBrauerData {
    pub kappa0: Vec<BrauerClass>,
    pub alpha: BrauerClass,
    pub quotient_order: u64,
    pub min_lift_order: u64,
    pub best_lift: Point,
    /// Whether the quotient order equals the least order over lifts.
    pub attained: bool,
}

pub fn kappa0(xi: &KummerClass) -> Result<RelativeBrauerData> {
    let e = xi.curve()?;
    if e.mordell_weil.rank != 0 {
        return Err(Error::Invalid(format!("{} has infinite Mordell–Weil group", e.id)));
    }
    let alpha = delta(xi)?;
    let points: Vec<Point> = e.torsion_table().into_iter().map(|(_, p)| p).collect();
    let mut group: Vec<BrauerClass> = vec![BrauerClass::zero(FieldId::Eisenstein)];
    for x in &points {
        let li = li_pairing(xi, x)?;
        // close under addition
        let mut frontier = vec![li];
        while let Some(c) = frontier.pop() {
            if group.contains(&c) {
                continue;
            }
            let new: Vec<BrauerClass> = group.iter().map(|g| g.add(&c)).collect();
            group.push(c);
            frontier.extend(new.into_iter().filter(|g| !group.contains(g)));
        }
    }
    let mut quotient_order = 1u64;
    let mut acc = alpha.clone();
    while !group.contains(&acc) {
        acc = acc.add(&alpha);
        quotient_order += 1;
    }
    let mut best: Option<(u64, Point)> = None;
    for x in &points {
        let o = delta(&xi.add(&iota(e, x)?)?)?.order();
        if best.as_ref().is_none_or(|(b, _)| o < *b) {
            best = Some((o, x.clone()));
        }
    }
    let (min_lift_order, best_lift) = best.expect("E(K) contains O");
    let mut kappa0 = group;
    kappa0.sort_by_key(|c| serde_json::to_string(c).unwrap_or_default());
    Ok(RelativeBrauerData {
        kappa0,
        alpha,
        quotient_order,
        min_lift_order,
        best_lift,
        attained: quotient_order == min_lift_order,
    })
}

/// Components of Δ(ξ) at the places of a list, for reporting.
pub fn local_orders(xi: &KummerClass, places: &[EisPrime]) -> Result<Vec<(Place, u64)>> {
    places
        .iter()
        .map(|v| Ok((Place::Eisenstein(*v), delta_at(xi, v)?.order())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::eis::{is_prime_u64, primes_above_split};
    use crate::arith::EisInt;
    use crate::elliptic::fermat_cubic;
    use proptest::prelude::*;

    fn fe(s: &str) -> FieldElem {
        FieldElem::parse(s).unwrap()
    }

    fn points() -> Vec<Point> {
        fermat_cubic().torsion_table().into_iter().map(|(_, p)| p).collect()
    }

    fn samples() -> Vec<KummerClass> {
        let e = fermat_cubic();
        [("2+3w", "-1+3w"), ("7", "13"), ("(2+3w)/(5)", "w"), ("1", "19"), ("1-w", "2")]
            .iter()
            .map(|(a, b)| phi(&fe(a), &fe(b), 3, e).unwrap())
            .collect()
    }

    #[test]
    fn phi_normalizes() {
        let e = fermat_cubic();
        assert!(phi(&fe("1"), &fe("1"), 3, e).unwrap().is_zero());
        let p = fe("2+3w");
        let c = fe("5");
        let x = phi(&p.mul(&c.pow(3)), &fe("-1+3w"), 3, e).unwrap();
        assert_eq!(x, phi(&p, &fe("-1+3w"), 3, e).unwrap());
        assert!(phi(&fe("-1"), &fe("1"), 3, e).unwrap().is_zero());
        assert!(phi(&fe("2"), &fe("3"), 2, e).is_err());
    }

    #[test]
    fn delta_of_trivial_first_slot() {
        let e = fermat_cubic();
        let xi = phi(&fe("1"), &fe("-1+3w"), 3, e).unwrap();
        assert!(delta(&xi).unwrap().is_zero());
    }

    #[test]
    fn iota_is_a_homomorphism_killed_by_delta() {
        let e = fermat_cubic();
        let pts = points();
        assert!(iota(e, &Point::Infinity).unwrap().is_zero());
        for x in &pts {
            assert!(delta(&iota(e, x).unwrap()).unwrap().is_zero(), "{x}");
            for y in &pts {
                let lhs = iota(e, &e.curve.add(x, y)).unwrap();
                let rhs = iota(e, x).unwrap().add(&iota(e, y).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "{x} + {y}");
            }
        }
        // the map is injective on E(K)/3E(K) = E[3]
        let images: std::collections::HashSet<String> =
            pts.iter().map(|x| format!("{:?}", iota(e, x).unwrap())).collect();
        assert_eq!(images.len(), 9);
    }

    #[test]
    fn lichtenbaum_pairing_is_bilinear() {
        let pts = points();
        let e = fermat_cubic();
        for xi in samples() {
            assert!(li_pairing(&xi, &Point::Infinity).unwrap().is_zero());
            for x in &pts {
                let lx = li_pairing(&xi, x).unwrap();
                for y in &pts {
                    let lxy = li_pairing(&xi, &e.curve.add(x, y)).unwrap();
                    assert_eq!(lxy, lx.add(&li_pairing(&xi, y).unwrap()));
                }
            }
        }
        let zero = KummerClass::zero(e, 3).unwrap();
        for x in &pts {
            assert!(li_pairing(&zero, x).unwrap().is_zero());
        }
    }

    #[test]
    fn delta_is_quadratic() {
        for xi in samples() {
            let d = delta(&xi).unwrap();
            for m in 0..4 {
                assert_eq!(delta(&xi.scale(m)).unwrap(), d.scale(m * m));
            }
        }
    }

    fn nine_split_primes(limit: u64) -> Vec<EisPrime> {
        (19u64..limit)
            .filter(|p| p % 9 == 1 && is_prime_u64(*p))
            .flat_map(primes_above_split)
            .collect()
    }

    #[test]
    fn level_change_identities() {
        let e = fermat_cubic();
        let ps = nine_split_primes(400);
        for (i, v) in ps.iter().enumerate() {
            let w = &ps[(i + 3) % ps.len()];
            let xi = phi(&FieldElem::prime(v), &FieldElem::prime(w), 3, e).unwrap();
            let j = lift_level(&xi, 3).unwrap();
            assert_eq!(j.level, 9);
            for u in [v, w] {
                assert_eq!(delta_at(&j, u).unwrap(), delta_at(&xi, u).unwrap().scale(3));
            }
            let eta = phi(&FieldElem::prime(v).mul(&fe("2")), &FieldElem::prime(w), 9, e).unwrap();
            let pushed = push_level(&eta, 3).unwrap();
            for u in [v, w] {
                assert_eq!(delta_at(&eta, u).unwrap().scale(3), delta_at(&pushed, u).unwrap());
            }
        }
        assert!(lift_level(&KummerClass::zero(e, 3).unwrap(), 3).unwrap().is_zero());
    }

    #[test]
    fn kappa0_of_zero_and_samples() {
        let e = fermat_cubic();
        let r = kappa0(&KummerClass::zero(e, 3).unwrap()).unwrap();
        assert_eq!(r.kappa0.len(), 1);
        assert_eq!(r.quotient_order, 1);
        for xi in samples() {
            let r = kappa0(&xi).unwrap();
            assert!(r.attained, "{xi:?}");
            assert_eq!(3 % r.quotient_order, 0);
        }
    }

    fn arb_class() -> impl Strategy<Value = KummerClass> {
        let elem = (-30i128..30, -30i128..30)
            .prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0)
            .prop_map(|(a, b)| FieldElem::from_eis(&EisInt::new(a, b)).unwrap());
        (elem.clone(), elem).prop_map(|(a, b)| phi(&a, &b, 3, fermat_cubic()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trip(xi in arb_class()) {
            let (a, b) = phi_inv(&xi);
            prop_assert_eq!(phi(&a, &b, 3, fermat_cubic()).unwrap(), xi);
        }

        #[test]
        fn delta_lands_in_three_torsion(xi in arb_class()) {
            let d = delta(&xi).unwrap();
            prop_assert_eq!(3 % d.order(), 0);
            prop_assert!(d.reciprocity_check());
        }
    }
}
