//! Norm-residue symbols: tame symbols over ℚ(ζ₃), the cubic symbol at the
//! ramified place, and quadratic Hilbert symbols over ℚ.

pub mod hilbert;
pub mod suite;
pub mod wild;

use crate::arith::local::unit_residue;
use crate::arith::{EisPrime, FieldElem, FieldId, Place, ResidueField};
use crate::brauer::{BrauerClass, LocalInvariant};
use crate::error::{Error, Result};
pub use hilbert::{hilbert2_global, hilbert2_local, Rat};
pub use suite::{reciprocity_suite, ReciprocitySuite};

/// Tame symbol ⟨a, b⟩ of level `n` at `v`, as k/n with
/// t^{(q−1)/n} = ζ̄^k for t = (−1)^{αβ} a^β b^{−α} reduced mod v.
pub fn tame_symbol(a: &FieldElem, b: &FieldElem, v: &EisPrime, n: u64) -> Result<LocalInvariant> {
    if n.is_multiple_of(v.characteristic()) {
        return Err(Error::WildPlace { place: v.to_string(), n });
    }
    let field = ResidueField::at(v);
    let q = field.q();
    if !(q - 1).is_multiple_of(n) {
        return Err(Error::LevelNotTame { n, q_minus_one: q - 1, place: v.to_string() });
    }
    let alpha = a.valuation(v);
    let beta = b.valuation(v);
    let ua = unit_residue(a, v, &field);
    let ub = unit_residue(b, v, &field);
    let pow_signed = |x, e: i64| {
        let r = field.pow(x, e.unsigned_abs());
        if e < 0 {
            field.inv(r).expect("unit residue")
        } else {
            r
        }
    };
    let mut t = field.mul(pow_signed(ua, beta), pow_signed(ub, -alpha));
    if (alpha * beta).rem_euclid(2) == 1 {
        t = field.neg(t);
    }
    let t = field.pow(t, (q - 1) / n);
    let zeta = field.root_of_unity(n).ok_or_else(|| Error::Invalid(format!("no root of unity of order {n} at {v}")))?;
    let k = field
        .dlog(t, zeta, n)
        .expect("t^{(q-1)/n} lies in the n-th roots of unity");
    Ok(LocalInvariant::new(k as i64, n))
}

/// Local symbol at any finite place of ℚ(ζ₃) for n = 3, routing the ramified
/// place through the wild evaluator.
pub fn local_symbol(a: &FieldElem, b: &FieldElem, v: &EisPrime, n: u64) -> Result<LocalInvariant> {
    if v.is_lambda() && n == 3 {
        return wild::wild_symbol(a, b);
    }
    tame_symbol(a, b, v, n)
}

/// Places of ℚ(ζ₃) where ⟨a, b⟩ can be nonzero: the primes dividing a or b,
/// and the ramified prime when 3 | n.
pub fn candidate_places(a: &FieldElem, b: &FieldElem, n: u64) -> Vec<EisPrime> {
    let mut out: Vec<EisPrime> = a.support().chain(b.support()).copied().collect();
    if n.is_multiple_of(3) {
        out.push(EisPrime::lambda());
    }
    out.sort();
    out.dedup();
    out
}

/// The global level-3 symbol over ℚ(ζ₃) as a Brauer class; reciprocity is
/// checked and a failure is an error.
pub fn symbol_global(a: &FieldElem, b: &FieldElem, n: u64) -> Result<BrauerClass> {
    if n != 3 {
        return Err(Error::Invalid(format!(
            "global symbols over Q(zeta3) need the n-th roots of unity; level {n} is local only"
        )));
    }
    let mut entries = Vec::new();
    for v in candidate_places(a, b, n) {
        entries.push((Place::Eisenstein(v), local_symbol(a, b, &v, n)?));
    }
    BrauerClass::global(FieldId::Eisenstein, entries)
}

/// Local symbols at the tame places of the support only, for levels with no
/// global root of unity (n = 9).
pub fn symbol_local_tame(a: &FieldElem, b: &FieldElem, n: u64) -> Result<BrauerClass> {
    let mut entries = Vec::new();
    for v in candidate_places(a, b, 1) {
        entries.push((Place::Eisenstein(v), tame_symbol(a, b, &v, n)?));
    }
    Ok(BrauerClass::local(FieldId::Eisenstein, entries))
}
