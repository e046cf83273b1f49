//! Local arithmetic at finite places of ℚ(ζ₃): valuations, residues of
//! units, power-residue orders and n-th power tests.
//!
//! At the wild place 1 − ω the n-th power test works in the finite ring
//! O/λ^m with m = v_λ(n³) + 1, well above the Hensel bound 2·v_λ(n) + 1.

use std::collections::{HashMap, HashSet};
use std::sync::{Mutex, OnceLock};

use super::eis::{EisInt, EisPrime};
use super::elem::FieldElem;
use super::residue::{Fq, ResidueField};
use crate::error::{Error, Result};

pub fn valuation(x: &FieldElem, v: &EisPrime) -> i64 {
    x.valuation(v)
}

/// Residue of `x / π^{v(x)}` at `v`, where π is the normalized generator.
pub fn unit_residue(x: &FieldElem, v: &EisPrime, field: &ResidueField) -> Fq {
    let mut acc = field.reduce(&EisInt::unit(x.unit_index()));
    for (p, e) in x.factors() {
        if p == v {
            continue;
        }
        let r = field.reduce(&p.value());
        let r = if *e < 0 { field.inv(r).expect("distinct primes reduce to units") } else { r };
        acc = field.mul(acc, field.pow(r, e.unsigned_abs()));
    }
    acc
}

/// Order of `u` in K_v^×/K_v^{×n}, for a v-unit `u` and `n | q − 1`.
pub fn power_residue_order(u: &FieldElem, v: &EisPrime, n: u64) -> Result<u64> {
    let field = ResidueField::at(v);
    let q = field.q();
    if n == 0 || !(q - 1).is_multiple_of(n) {
        return Err(Error::LevelNotTame { n, q_minus_one: q - 1, place: v.to_string() });
    }
    if u.valuation(v) != 0 {
        return Err(Error::NotUnit(v.to_string()));
    }
    let t = field.pow(unit_residue(u, v, &field), (q - 1) / n);
    Ok(field.order(t))
}

/// Whether `u` lies in K_v^{×n}.
pub fn is_nth_power_local(u: &FieldElem, v: &EisPrime, n: u64) -> bool {
    if n <= 1 {
        return true;
    }
    let alpha = u.valuation(v);
    if alpha.rem_euclid(n as i64) != 0 {
        return false;
    }
    if v.characteristic() == 3 && n.is_multiple_of(3) {
        return wild_unit_is_power(u, n);
    }
    // tame: Hensel reduces to the residue field, where the n-th powers of
    // F_q^× are the g-th powers with g = gcd(n, q − 1)
    let field = ResidueField::at(v);
    let q1 = field.q() - 1;
    let g = num_integer::gcd(n, q1);
    let r = unit_residue(u, v, &field);
    field.pow(r, q1 / g) == field.one()
}

/// λ-adic precision used by the wild n-th power test: v_λ(n³) + 1.
pub fn wild_precision(n: u64) -> u32 {
    let mut v3 = 0;
    let mut m = n;
    while m.is_multiple_of(3) {
        m /= 3;
        v3 += 1;
    }
    // v_λ(3) = 2
    3 * 2 * v3 + 1
}

/// Arithmetic in O/3^K = (ℤ/3^K)[ω] with 3^K ∈ λ^m, used to represent classes mod λ^m.
#[derive(Clone, Copy, Debug)]
pub struct LambdaRing {
    m: u32,
    modulus: i128,
}

impl LambdaRing {
    pub fn new(m: u32) -> Self {
        let k = m.div_ceil(2);
        LambdaRing { m, modulus: 3i128.pow(k) }
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn reduce(&self, x: &EisInt) -> (i128, i128) {
        (x.a.rem_euclid(self.modulus), x.b.rem_euclid(self.modulus))
    }

    pub fn mul(&self, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
        let m = self.modulus;
        let ac = x.0 * y.0 % m;
        let bd = x.1 * y.1 % m;
        let ad = x.0 * y.1 % m;
        let bc = x.1 * y.0 % m;
        ((ac - bd).rem_euclid(m), (ad + bc - bd).rem_euclid(m))
    }

    pub fn pow(&self, mut x: (i128, i128), mut e: u64) -> (i128, i128) {
        let mut acc = (1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a λ-unit: conj(x)·N(x)^{-1}.
    pub fn inv(&self, x: (i128, i128)) -> (i128, i128) {
        let m = self.modulus;
        let conj = ((x.0 - x.1).rem_euclid(m), (-x.1).rem_euclid(m));
        let n = (x.0 * x.0 - x.0 * x.1 + x.1 * x.1).rem_euclid(m);
        let ninv = super::residue::inv_mod(n as u64, m as u64) as i128;
        self.mul(conj, (ninv, 0))
    }

    /// Canonical representative of the class modulo λ^m.
    pub fn canonical(&self, x: (i128, i128)) -> (i128, i128) {
        let m = self.m;
        if m.is_multiple_of(2) {
            let md = 3i128.pow(m / 2);
            return (x.0.rem_euclid(md), x.1.rem_euclid(md));
        }
        // λ^{2j+1} = 3^j·λ·unit; 3^j·ω ≡ 3^j, so fold b's high digit into a
        let j = (m - 1) / 2;
        let pj = 3i128.pow(j);
        let b = x.1.rem_euclid(pj);
        let t = (x.1 - b) / pj;
        ((x.0 + t * pj).rem_euclid(pj * 3), b)
    }

    pub fn is_unit(&self, x: (i128, i128)) -> bool {
        // residue mod λ is a + b mod 3
        (x.0 + x.1).rem_euclid(3) != 0
    }

    /// Image of a λ-unit field element.
    pub fn reduce_unit(&self, u: &FieldElem) -> (i128, i128) {
        let lam = EisPrime::lambda();
        let mut acc = self.reduce(&EisInt::unit(u.unit_index()));
        for (p, e) in u.factors() {
            if *p == lam {
                continue;
            }
            let mut r = self.reduce(&p.value());
            if *e < 0 {
                r = self.inv(r);
            }
            acc = self.mul(acc, self.pow(r, e.unsigned_abs()));
        }
        acc
    }

    /// All canonical classes of units mod λ^m.
    pub fn units(&self) -> impl Iterator<Item = (i128, i128)> + '_ {
        let m = self.m;
        let (amax, bmax) = if m.is_multiple_of(2) {
            (3i128.pow(m / 2), 3i128.pow(m / 2))
        } else {
            (3i128.pow(m.div_ceil(2)), 3i128.pow(m / 2))
        };
        (0..amax)
            .flat_map(move |a| (0..bmax).map(move |b| (a, b)))
            .filter(move |x| self.is_unit(*x))
    }
}

type PowerTable = HashSet<(i128, i128)>;

fn power_table(n: u64, m: u32) -> std::sync::Arc<PowerTable> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), std::sync::Arc<PowerTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(n, m)) {
        return t.clone();
    }
    let ring = LambdaRing::new(m);
    let table: PowerTable = ring.units().map(|x| ring.canonical(ring.pow(x, n))).collect();
    let table = std::sync::Arc::new(table);
    cache.lock().unwrap().insert((n, m), table.clone());
    table
}

/// Exhaustive test at precision `m`: is the λ-unit part of `u` congruent to
/// an n-th power of a unit modulo λ^m?
pub fn is_power_mod_lambda(u: &FieldElem, n: u64, m: u32) -> bool {
    let ring = LambdaRing::new(m);
    let lam = EisPrime::lambda();
    // strip λ^α; the caller has checked n | α
    let alpha = u.valuation(&lam);
    let unit = u.div(&FieldElem::prime(&lam).pow(alpha));
    let r = ring.canonical(ring.reduce_unit(&unit));
    // λ^α itself: λ^n·(unit), so λ^{α} = (λ^n)^{α/n} is an n-th power
    power_table(n, m).contains(&r)
}

fn wild_unit_is_power(u: &FieldElem, n: u64) -> bool {
    is_power_mod_lambda(u, n, wild_precision(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(s: &str) -> FieldElem {
        FieldElem::parse(s).unwrap()
    }

    fn prime(s: &str) -> EisPrime {
        EisPrime::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn valuations_from_factorization() {
        let v = prime("3+w");
        assert_eq!(valuation(&fe("7"), &v), 1);
        assert_eq!(valuation(&fe("1"), &v), 0);
        let x = FieldElem::prime(&v).pow(3).mul(&fe("2"));
        assert_eq!(valuation(&x, &v), 3);
    }

    #[test]
    fn cubic_residues_mod_seven() {
        // cubes in F_7^× are {1, 6}
        let cubes: Vec<u64> = (1..7u64).map(|x| x * x * x % 7).collect();
        assert!(cubes.iter().all(|c| *c == 1 || *c == 6));
        let v = prime("3+w");
        assert_eq!(power_residue_order(&fe("2"), &v, 3).unwrap(), 3);
        assert_eq!(power_residue_order(&fe("6"), &v, 3).unwrap(), 1);
        assert_eq!(power_residue_order(&fe("1"), &v, 3).unwrap(), 1);
        assert!(power_residue_order(&fe("2"), &v, 9).is_err());
        assert!(power_residue_order(&fe("7"), &v, 3).is_err());
    }

    #[test]
    fn eight_is_a_cube_at_two_minus_omega() {
        assert!(is_nth_power_local(&fe("8"), &prime("2-w"), 3));
        let v = prime("2-w");
        assert!(!is_nth_power_local(&FieldElem::prime(&v), &v, 3));
        assert!(!is_nth_power_local(&FieldElem::prime(&v), &v, 2));
    }

    #[test]
    fn one_plus_lambda_power_is_a_cube() {
        let m = wild_precision(3);
        assert_eq!(m, 7);
        let lam = EisInt::LAMBDA;
        let x = FieldElem::from_eis(&(EisInt::ONE + lam.pow(m))).unwrap();
        assert!(is_nth_power_local(&x, &EisPrime::lambda(), 3));
        // ω generates μ₃, not a cube in the completion
        assert!(!is_nth_power_local(&fe("w"), &EisPrime::lambda(), 3));
        // 1 + λ³ is not a cube: cubes of principal units land in 1 + λ⁴
        let y = FieldElem::from_eis(&(EisInt::ONE + lam.pow(3))).unwrap();
        assert!(!is_nth_power_local(&y, &EisPrime::lambda(), 3));
    }

    #[test]
    fn wild_precision_agrees_with_hensel_bound() {
        // the classical bound 2·v_λ(3) + 1 = 5 gives the same verdicts
        let ring7 = LambdaRing::new(7);
        for x in ring7.units().take(400) {
            let e = EisInt::new(x.0, x.1);
            let u = FieldElem::from_eis(&e).unwrap();
            assert_eq!(is_power_mod_lambda(&u, 3, 7), is_power_mod_lambda(&u, 3, 5), "{e}");
        }
    }

    #[test]
    fn canonical_reps_count() {
        for m in 1..=7 {
            let ring = LambdaRing::new(m);
            let units = ring.units().count() as u64;
            // |(O/λ^m)^×| = 3^m − 3^{m−1}
            assert_eq!(units, 3u64.pow(m) - 3u64.pow(m - 1));
        }
    }
}
