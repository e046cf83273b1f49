//! Quadratic Hilbert symbols over ℚ.

use num_rational::Rational64;

use crate::arith::eis::factor_u128;
use crate::arith::{FieldId, Place};
use crate::brauer::{BrauerClass, LocalInvariant};
use crate::error::{Error, Result};

pub type Rat = Rational64;

/// `x = p^v · u` with `u` a p-adic unit given as numerator and denominator.
fn split(x: &Rat, p: i64) -> (i64, i64, i64) {
    let (mut n, mut d) = (*x.numer(), *x.denom());
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    while d % p == 0 {
        d /= p;
        v -= 1;
    }
    (v, n, d)
}

fn legendre(a: i64, p: i64) -> i32 {
    let a = a.rem_euclid(p) as u128;
    let p = p as u128;
    let mut r = 1u128;
    let (mut b, mut e) = (a, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// ⟨a, b⟩ of level 2 at `place` (a rational prime or the real place): 0 iff
/// z² = ax² + by² has a nontrivial solution there.
pub fn hilbert2_local(a: &Rat, b: &Rat, place: &Place) -> Result<LocalInvariant> {
    if *a.numer() == 0 || *b.numer() == 0 {
        return Err(Error::Zero);
    }
    let minus = match place {
        Place::Real => *a.numer() < 0 && *b.numer() < 0,
        Place::Rational(2) => {
            let (al, ua, da) = split(a, 2);
            let (be, ub, db) = (split(b, 2).0, split(b, 2).1, split(b, 2).2);
            // a unit's class mod 8 is numerator times denominator (d² ≡ 1)
            let u = (ua as i128 * da as i128).rem_euclid(8) as i64;
            let w = (ub as i128 * db as i128).rem_euclid(8) as i64;
            let eps = |x: i64| ((x - 1) / 2) & 1;
            let omega = |x: i64| ((x * x - 1) / 8) & 1;
            let e = eps(u) * eps(w) + al.rem_euclid(2) * omega(w) + be.rem_euclid(2) * omega(u);
            e % 2 == 1
        }
        Place::Rational(p) => {
            let p = *p as i64;
            let (al, ua, da) = split(a, p);
            let (be, ub, db) = split(b, p);
            let eps = ((p - 1) / 2) & 1;
            let mut s = if (al * be * eps).rem_euclid(2) == 1 { -1 } else { 1 };
            if be.rem_euclid(2) == 1 {
                s *= legendre(ua, p) * legendre(da, p);
            }
            if al.rem_euclid(2) == 1 {
                s *= legendre(ub, p) * legendre(db, p);
            }
            s == -1
        }
        Place::Eisenstein(_) => {
            return Err(Error::Invalid("quadratic symbols live over Q".into()));
        }
    };
    Ok(LocalInvariant::new(minus as i64, 2))
}

/// ⟨a, b⟩ over ℚ as a Brauer class on 2, ∞ and the primes dividing a, b.
pub fn hilbert2_global(a: &Rat, b: &Rat) -> Result<BrauerClass> {
    let mut primes: Vec<u64> = vec![2];
    for x in [a.numer(), a.denom(), b.numer(), b.denom()] {
        primes.extend(factor_u128(x.unsigned_abs() as u128).into_iter().map(|(p, _)| p as u64));
    }
    primes.sort();
    primes.dedup();
    let mut entries = vec![(Place::Real, hilbert2_local(a, b, &Place::Real)?)];
    for p in primes {
        let v = Place::Rational(p);
        entries.push((v, hilbert2_local(a, b, &v)?));
    }
    BrauerClass::global(FieldId::Rational, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n)
    }

    #[test]
    fn textbook_values() {
        // 2 is a nonresidue mod 5
        assert_eq!(hilbert2_local(&r(2), &r(5), &Place::Rational(5)).unwrap(), LocalInvariant::new(1, 2));
        assert_eq!(hilbert2_local(&r(-1), &r(-1), &Place::Real).unwrap(), LocalInvariant::new(1, 2));
        assert_eq!(hilbert2_local(&r(-1), &r(-1), &Place::Rational(2)).unwrap(), LocalInvariant::new(1, 2));
        for p in [Place::Real, Place::Rational(2), Place::Rational(3), Place::Rational(7)] {
            assert!(hilbert2_local(&r(1), &r(-21), &p).unwrap().is_zero());
        }
    }

    #[test]
    fn two_two_matches_two_minus_one() {
        // ⟨2, 2⟩ = ⟨2, −1⟩ = 0 everywhere since ⟨a, −a⟩ = 0
        assert!(hilbert2_global(&r(2), &r(2)).unwrap().is_zero());
        assert!(hilbert2_global(&r(2), &r(-1)).unwrap().is_zero());
    }

    #[test]
    fn product_formula_on_a_grid() {
        for a in -30i64..=30 {
            for b in -30i64..=30 {
                if a == 0 || b == 0 {
                    continue;
                }
                let c = hilbert2_global(&r(a), &r(b)).unwrap();
                assert!(c.reciprocity_check());
                assert_eq!(c.places().len() % 2, 0);
            }
        }
        let c = hilbert2_global(&Rat::new(3, 10), &Rat::new(-7, 4)).unwrap();
        assert!(c.reciprocity_check());
    }
}
