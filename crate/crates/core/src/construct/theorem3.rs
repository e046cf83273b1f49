//! Local specification of a degree-P extension of ℚ over which the first r
//! classes of a sequence become locally trivial and stay distinct.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::certificate::{compare, LedgerEntry, VERSION};
use super::search::SearchParams;
use super::theorem2::{check_difference_order, rebuild_sequence, SequenceCertificate};
use crate::arith::eis::primes_above;
use crate::arith::{EisInt, Place};
use crate::brauer::BrauerClass;
use crate::elliptic::curve as catalog_curve;
use crate::error::{Error, Result};
use crate::obstruction::delta;

/// A rational prime of the plan with the places above it and the
/// ramification index the local extension must have.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedPlace {
    pub prime: u64,
    pub places_above: Vec<Place>,
    pub ramification: u32,
    pub classes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionCheck {
    pub index: usize,
    pub delta: BrauerClass,
    pub restricted: BrauerClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distinctness {
    pub i: usize,
    pub j: usize,
    pub place: Place,
    pub local_order: u64,
    pub index: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingPlan {
    pub version: u32,
    pub curve_id: String,
    #[serde(rename = "P")]
    pub p: u32,
    pub r: usize,
    pub pairs: Vec<(EisInt, EisInt)>,
    pub s_k: Vec<u64>,
    /// Infinite places, places above P, and bad places.
    pub excluded: Vec<Place>,
    pub places: Vec<PlannedPlace>,
    pub place_count: usize,
    pub restrictions: Vec<RestrictionCheck>,
    pub distinctness: Vec<Distinctness>,
    pub ledger: Vec<LedgerEntry>,
}

/// Plans the extension for the first `r` classes of `seq`.
pub fn splitting_plan_theorem3(seq: &SequenceCertificate, r: usize) -> Result<SplittingPlan> {
    if r > seq.r {
        return Err(Error::Invalid(format!("r = {r} exceeds the sequence length {}", seq.r)));
    }
    let e = catalog_curve(&seq.curve_id)?;
    let p = seq.p;
    let mut excluded: BTreeSet<Place> = BTreeSet::from([Place::Real]);
    for (l, _) in crate::arith::eis::factor_u128(p as u128) {
        excluded.insert(Place::Rational(l as u64));
    }
    for w in &e.bad_places {
        if let Some(l) = w.characteristic() {
            excluded.insert(Place::Rational(l));
        }
    }
    // support of each class: where it is ramified or its obstruction lives
    let mut deltas = Vec::new();
    let mut support: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for i in 1..=r {
        let xi = seq.class(i)?;
        let d = delta(&xi)?;
        let mut primes: BTreeSet<u64> = xi.support().iter().map(|w| w.characteristic()).collect();
        primes.extend(d.places().iter().filter_map(|w| w.characteristic()));
        for l in primes {
            if excluded.contains(&Place::Rational(l)) {
                return Err(Error::Invalid(format!("class {i} is supported at {l}, which lies in S")));
            }
            support.entry(l).or_default().push(i);
        }
        deltas.push((i, d));
    }
    let mut places = Vec::new();
    let mut degrees: BTreeMap<Place, u64> = BTreeMap::new();
    for (&l, classes) in &support {
        let above: Vec<Place> = primes_above(l)?.into_iter().map(Place::Eisenstein).collect();
        for w in &above {
            degrees.insert(*w, p as u64);
        }
        places.push(PlannedPlace { prime: l, places_above: above, ramification: p, classes: classes.clone() });
    }
    let mut restrictions = Vec::new();
    for (i, d) in deltas {
        let restricted = d.restrict(&degrees)?;
        if !restricted.is_zero() {
            return Err(Error::Verification(format!("obstruction of class {i} survives restriction: {restricted}")));
        }
        restrictions.push(RestrictionCheck { index: i, delta: d, restricted });
    }
    let mut distinctness = Vec::new();
    for i in 1..=r {
        for j in 0..i {
            let c = check_difference_order(i, j, seq)?;
            distinctness.push(Distinctness { i, j, place: c.place, local_order: c.local_order, index: c.index.value });
        }
    }
    let names: Vec<String> = excluded.iter().map(|x| x.to_string()).collect();
    let mut ledger = Vec::new();
    if r > 0 {
        let listed: Vec<String> = places.iter().map(|x| x.prime.to_string()).collect();
        ledger.extend([
            LedgerEntry::checked(
                "supports avoid S",
                format!("supports lie over {{{}}}, disjoint from {{{}}}", listed.join(", "), names.join(", ")),
            ),
            LedgerEntry::checked(
                format!("obstructions vanish after ramification of index {p}"),
                format!("every local invariant of the {r} obstructions is killed by {p} at {} places", places.len()),
            ),
            LedgerEntry::external(
                "a good place prime to P splits a class of period P exactly when P divides the ramification index",
                "Lang-Tate",
            ),
            LedgerEntry::theorem(
                format!("a global extension L of degree {p} has the prescribed completions"),
                "weak approximation with Krasner's lemma",
            ),
            LedgerEntry::checked(
                format!("all differences of the {r} classes and 0 have index {}", p * p),
                format!("{} difference checks passed", distinctness.len()),
            ),
            LedgerEntry::theorem(
                format!("the restrictions to L are distinct, locally trivial, of period and index {p}"),
                "a coincidence would put a difference in the kernel of restriction, forcing its index to divide P",
            ),
        ]);
    }
    Ok(SplittingPlan {
        version: VERSION,
        curve_id: seq.curve_id.clone(),
        p,
        r,
        pairs: seq.pairs()[..r].to_vec(),
        s_k: seq.s_k.clone(),
        excluded: excluded.into_iter().collect(),
        place_count: places.len(),
        places,
        restrictions,
        distinctness,
        ledger,
    })
}

impl SplittingPlan {
    pub fn recompute(&self) -> Result<Self> {
        let e = catalog_curve(&self.curve_id)?;
        let seq = rebuild_sequence(e, self.p, &self.pairs, &self.s_k, SearchParams { bound: 0, seed: 0 })?;
        splitting_plan_theorem3(&seq, self.r)
    }

    pub fn verify(&self) -> Result<()> {
        compare(self, &self.recompute()?)
    }
}
