//! Sequences of classes over ℚ whose pairwise differences have period P and
//! index P², built from prime pairs over ℚ(ζ₃) and their norms.

use serde::{Deserialize, Serialize};

use super::certificate::{compare, Index, LedgerEntry, Period, VERSION};
use super::conditions::{elem, evaluate_sc_sequence, first_failure, prime_of, Evidence};
use super::galois::{galois_action, invariance_report, nm_corestrict, GaloisAction, InvarianceReport, NormForm, PairRepr};
use super::search::{candidates, search_sequence_pair, SearchOutcome, SearchParams};
use super::theorem1::period_of;
use crate::arith::eis::primes_above;
use crate::arith::local::is_nth_power_local;
use crate::arith::{EisInt, EisPrime, FieldElem, FieldId, Place};
use crate::brauer::{BrauerClass, LocalInvariant};
use crate::elliptic::{curve as catalog_curve, CurveDatum};
use crate::error::{Error, Result};
use crate::obstruction::{delta, phi, KummerClass};
use crate::symbols::local_symbol;

/// Which class is corestricted: Φ(π, 1) or Φ(π, π′).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    PiOnly,
    PiAndPiPrime,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub index: usize,
    pub pi: EisInt,
    pub pi_prime: EisInt,
    pub evidence: Vec<Evidence>,
    /// Nm Φ(π, 1).
    pub c_d: PairRepr,
    /// Nm Φ(1, π′).
    pub c_d_prime: PairRepr,
    /// Order of ⟨c, d⟩ at v.
    pub cd_order: u64,
    pub branch: Branch,
    pub theta: PairRepr,
    /// The restriction of the corestricted class, Nm θ.
    pub class: PairRepr,
    pub order_at_v: u64,
    pub invariance: InvarianceReport,
    pub local_triviality: Vec<LedgerEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceCertificate {
    pub version: u32,
    pub base: FieldId,
    pub extension: FieldId,
    pub curve_id: String,
    #[serde(rename = "P")]
    pub p: u32,
    pub r: usize,
    /// Rational primes at which every class must be locally trivial.
    pub s_k: Vec<u64>,
    pub search: SearchParams,
    pub galois: GaloisAction,
    pub norm_form: NormForm,
    pub det_discrepancy: bool,
    pub entries: Vec<SequenceEntry>,
}

fn class_of(e: &CurveDatum, p: u32, x: &PairRepr) -> Result<KummerClass> {
    phi(&x.a, &x.b, p, e)
}

fn check_s_k(e: &CurveDatum, s_k: &[u64]) -> Result<Vec<u64>> {
    let mut out = s_k.to_vec();
    out.sort_unstable();
    out.dedup();
    for &l in &out {
        primes_above(l)?;
    }
    if e.field != FieldId::Eisenstein {
        return Err(Error::Invalid(format!("{} is not defined over Q(zeta3)", e.id)));
    }
    Ok(out)
}

/// Local triviality of the corestricted class at each rational prime of
/// `s_k`: at bad places θ is a pair of cubes, elsewhere θ is unramified.
fn local_triviality(e: &CurveDatum, theta: &KummerClass, s_k: &[u64], index: usize) -> Result<Vec<LedgerEntry>> {
    let p = theta.level as u64;
    let bad: Vec<EisPrime> = e.bad_places.iter().filter_map(|x| x.prime().copied()).collect();
    let mut out = Vec::new();
    let mut unramified = false;
    for &l in s_k {
        let above = primes_above(l)?;
        let claim = format!("theta_{index} restricts to 0 above {l}");
        if above.iter().all(|w| bad.contains(w)) {
            for w in &above {
                for (name, x) in [("a", &theta.a), ("b", &theta.b)] {
                    if !is_nth_power_local(x, w, p) {
                        return Err(Error::Verification(format!("theta_{index}.{name} is not a cube at bad place {w}")));
                    }
                }
            }
            let ws: Vec<String> = above.iter().map(|w| w.to_string()).collect();
            out.push(LedgerEntry::checked(claim, format!("both components are cubes at {}", ws.join(", "))));
        } else {
            for w in &above {
                if bad.contains(w) {
                    continue;
                }
                if theta.a.valuation(w) % p as i64 != 0 || theta.b.valuation(w) % p as i64 != 0 {
                    return Err(Error::Verification(format!("theta_{index} is ramified at {w}, a place of S_K")));
                }
            }
            unramified = true;
            out.push(LedgerEntry::checked(
                format!("theta_{index} is unramified above {l}"),
                "valuations of both components are 0 mod P at every good place above it",
            ));
        }
    }
    if unramified {
        out.push(LedgerEntry::external(
            "unramified classes vanish in H^1 at good places prime to P",
            "Lang-Tate: restriction to the maximal unramified extension is injective",
        ));
    }
    if !s_k.is_empty() {
        out.push(LedgerEntry::theorem(
            format!("eta_{index} is locally trivial at S_K"),
            "corestriction maps the sum of the local groups above a place onto the local group below it",
        ));
    }
    Ok(out)
}

/// Norms of Φ(π, 1) and Φ(1, π′), the branch, and the chosen class.
fn build_entry(
    e: &CurveDatum,
    act: &GaloisAction,
    p: u32,
    index: usize,
    pi: EisInt,
    pi_prime: EisInt,
    evidence: Vec<Evidence>,
    s_k: &[u64],
) -> Result<SequenceEntry> {
    let (x, xp) = (elem(&pi)?, elem(&pi_prime)?);
    let v = prime_of(&pi)?;
    let one = FieldElem::one();
    let cd = nm_corestrict(&phi(&x, &one, p, e)?, act, NormForm::Verbatim)?;
    let cdp = nm_corestrict(&phi(&one, &xp, p, e)?, act, NormForm::Verbatim)?;
    let cd_order = local_symbol(&cd.a, &cd.b, &v, p as u64)?.order();
    let (branch, theta, class) = if cd_order == p as u64 {
        (Branch::PiOnly, phi(&x, &one, p, e)?, cd.clone())
    } else {
        (Branch::PiAndPiPrime, phi(&x, &xp, p, e)?, cd.add(&cdp)?)
    };
    if nm_corestrict(&theta, act, NormForm::Verbatim)? != class {
        return Err(Error::Verification(format!("norm of theta_{index} is not additive")));
    }
    let order_at_v = local_symbol(&class.a, &class.b, &v, p as u64)?.order();
    if order_at_v != p as u64 {
        return Err(Error::Verification(format!(
            "<a_{index}, b_{index}> has order {order_at_v} at {v}, expected {p}"
        )));
    }
    Ok(SequenceEntry {
        index,
        pi,
        pi_prime,
        evidence,
        c_d: (&cd).into(),
        c_d_prime: (&cdp).into(),
        cd_order,
        branch,
        invariance: invariance_report(&theta, act)?,
        local_triviality: local_triviality(e, &theta, s_k, index)?,
        theta: (&theta).into(),
        class: (&class).into(),
        order_at_v,
    })
}

fn assemble(
    e: &CurveDatum,
    p: u32,
    s_k: Vec<u64>,
    search: SearchParams,
    act: GaloisAction,
    entries: Vec<SequenceEntry>,
) -> SequenceCertificate {
    SequenceCertificate {
        version: VERSION,
        base: FieldId::Rational,
        extension: e.field,
        curve_id: e.id.clone(),
        p,
        r: entries.len(),
        s_k,
        search,
        norm_form: NormForm::Verbatim,
        det_discrepancy: entries.iter().any(|x| x.invariance.det_discrepancy),
        galois: act,
        entries,
    }
}

/// Searches r pairs inductively and builds the sequence; the first index
/// with no pair below the bound ends the search with its report.
pub fn build_theorem2_sequence(
    e: &CurveDatum,
    p: u32,
    r: usize,
    s_k: &[u64],
    bound: u64,
    seed: u64,
) -> Result<SearchOutcome<SequenceCertificate>> {
    super::conditions::require_level(e, p)?;
    let s_k = check_s_k(e, s_k)?;
    let act = galois_action(e)?;
    act.check_homomorphism()?;
    let search = SearchParams { bound, seed };
    let cands = if r == 0 { Vec::new() } else { candidates(bound, seed) };
    let mut prior: Vec<(EisInt, EisInt)> = Vec::new();
    let mut entries = Vec::new();
    for index in 1..=r {
        match search_sequence_pair(e, p, index, &prior, &s_k, &cands, &search)? {
            SearchOutcome::Exhausted(rep) => return Ok(SearchOutcome::Exhausted(rep)),
            SearchOutcome::Found((pi, pp, ev)) => {
                entries.push(build_entry(e, &act, p, index, pi, pp, ev, &s_k)?);
                prior.push((pi, pp));
            }
        }
    }
    Ok(SearchOutcome::Found(assemble(e, p, s_k, search, act, entries)))
}

/// Rebuilds a sequence from its pairs, re-running every condition.
pub fn rebuild_sequence(
    e: &CurveDatum,
    p: u32,
    pairs: &[(EisInt, EisInt)],
    s_k: &[u64],
    search: SearchParams,
) -> Result<SequenceCertificate> {
    super::conditions::require_level(e, p)?;
    let s_k = check_s_k(e, s_k)?;
    let act = galois_action(e)?;
    act.check_homomorphism()?;
    let mut entries = Vec::new();
    for (k, (pi, pp)) in pairs.iter().enumerate() {
        let index = k + 1;
        for w in [prime_of(pi)?, prime_of(pp)?] {
            if s_k.contains(&w.characteristic()) {
                return Err(Error::Verification(format!("{w} lies over a prime of S_K")));
            }
        }
        let ev = evaluate_sc_sequence(index, pi, pp, &pairs[..k], e, p)?;
        first_failure(&ev)?;
        entries.push(build_entry(e, &act, p, index, *pi, *pp, ev, &s_k)?);
    }
    Ok(assemble(e, p, s_k, search, act, entries))
}

impl SequenceCertificate {
    pub fn pairs(&self) -> Vec<(EisInt, EisInt)> {
        self.entries.iter().map(|x| (x.pi, x.pi_prime)).collect()
    }

    pub fn recompute(&self) -> Result<Self> {
        let e = catalog_curve(&self.curve_id)?;
        rebuild_sequence(e, self.p, &self.pairs(), &self.s_k, self.search.clone())
    }

    pub fn verify(&self) -> Result<()> {
        compare(self, &self.recompute()?)
    }

    /// The restricted class at position `k`; position 0 is the zero class.
    pub fn class(&self, k: usize) -> Result<KummerClass> {
        let e = catalog_curve(&self.curve_id)?;
        match k {
            0 => KummerClass::zero(e, self.p),
            _ => {
                let x = self
                    .entries
                    .get(k - 1)
                    .ok_or_else(|| Error::Invalid(format!("index {k} beyond the sequence length {}", self.r)))?;
                class_of(e, self.p, &x.class)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolTerm {
    pub term: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceCertificate {
    pub version: u32,
    pub curve_id: String,
    #[serde(rename = "P")]
    pub p: u32,
    pub i: usize,
    pub j: usize,
    pub pairs: Vec<(EisInt, EisInt)>,
    pub s_k: Vec<u64>,
    pub place: Place,
    pub class: PairRepr,
    pub terms: Vec<SymbolTerm>,
    pub local_invariant: String,
    pub local_order: u64,
    pub delta: BrauerClass,
    pub period: Period,
    pub index: Index,
}

fn term(label: String, x: LocalInvariant) -> SymbolTerm {
    SymbolTerm { term: label, value: x.to_string() }
}

/// Checks that the difference of positions `i` and `j` has obstruction of
/// order P at the earlier nonzero position's prime, and certifies period P
/// and index P².
pub fn check_difference_order(i: usize, j: usize, seq: &SequenceCertificate) -> Result<DifferenceCertificate> {
    if i == j {
        return Err(Error::Invalid(format!("positions {i} and {j} coincide; the difference is 0")));
    }
    let p = seq.p;
    let (ci, cj) = (seq.class(i)?, seq.class(j)?);
    let diff = ci.sub(&cj)?;
    let m = match (i, j) {
        (0, k) | (k, 0) => k,
        _ => i.min(j),
    };
    let entry_m = &seq.entries[m - 1];
    let v = prime_of(&entry_m.pi)?;
    let sym = |a: &FieldElem, b: &FieldElem| local_symbol(a, b, &v, p as u64);
    let t = [
        sym(&ci.a, &ci.b)?,
        sym(&ci.a, &cj.b)?.neg(),
        sym(&cj.a, &ci.b)?.neg(),
        sym(&cj.a, &cj.b)?,
    ];
    let total = t.iter().fold(LocalInvariant::zero(), |acc, x| acc.add(x));
    let direct = sym(&diff.a, &diff.b)?;
    if total != direct {
        return Err(Error::Verification(format!(
            "bilinear expansion {total} differs from the direct symbol {direct} at {v}"
        )));
    }
    // only the term built from position m alone survives
    let main = if m == i { 0 } else { 3 };
    if let Some(k) = (0..4).find(|&k| k != main && !t[k].is_zero()) {
        return Err(Error::Verification(format!("cross term {k} is {} at {v}, expected 0", t[k])));
    }
    if direct.order() != p as u64 {
        return Err(Error::Verification(format!(
            "difference has order {} at {v}, expected {p}",
            direct.order()
        )));
    }
    let labels = [
        format!("<a_{i}, b_{i}>"),
        format!("-<a_{i}, b_{j}>"),
        format!("-<a_{j}, b_{i}>"),
        format!("<a_{j}, b_{j}>"),
    ];
    let terms: Vec<SymbolTerm> = labels.into_iter().zip(t).map(|(l, x)| term(l, x)).collect();
    let ramified: Vec<EisPrime> = [i, j]
        .iter()
        .filter(|&&k| k > 0)
        .map(|&k| prime_of(&seq.entries[k - 1].pi_prime))
        .collect::<Result<_>>()?;
    let mut period = period_of(&diff, &ramified)?;
    if period.value != p {
        return Err(Error::Verification(format!("restricted difference has period {}", period.value)));
    }
    period.premises.push(LedgerEntry::theorem(
        format!("the class over Q has period {p}"),
        "it is killed by P, and restriction to Q(zeta3) cannot raise the period",
    ));
    let sc2: Vec<String> = entry_m
        .evidence
        .iter()
        .filter(|x| x.condition == "SC2'")
        .map(|x| format!("{}: {}", x.subject, x.value))
        .collect();
    let ledger = vec![
        LedgerEntry::checked(
            format!("obstruction of the restricted difference has order {p} at {v}"),
            format!("four-term expansion {} sums to {direct}", terms.iter().map(|x| x.value.as_str()).collect::<Vec<_>>().join(" + ")),
        ),
        LedgerEntry::theorem(
            format!("obstruction over Q has order {p} at {}", v.characteristic()),
            "restriction to the split place above it preserves the local invariant",
        ),
        LedgerEntry::checked(
            format!("E(Q) is {p}-divisible locally at {}", v.characteristic()),
            format!("SC2' evidence: {}", sc2.join("; ")),
        ),
        LedgerEntry::theorem(format!("index divides {}", p * p), "P | I | P^2 for a class of period P"),
        LedgerEntry::theorem(
            format!("index equals {}", p * p),
            format!(
                "a lift of level P*D with vanishing obstruction differs from j(xi) by a Kummer image whose Tate pairing \
                 vanishes at {}, so D times an order-{p} invariant is 0 and D = {p}",
                v.characteristic()
            ),
        ),
    ];
    let value = p * p;
    let index = Index { value, lower_bound: value, upper_bound: value, ledger };
    index.check(p)?;
    Ok(DifferenceCertificate {
        version: VERSION,
        curve_id: seq.curve_id.clone(),
        p,
        i,
        j,
        pairs: seq.pairs()[..i.max(j)].to_vec(),
        s_k: seq.s_k.clone(),
        place: Place::Eisenstein(v),
        class: (&diff).into(),
        terms,
        local_invariant: direct.to_string(),
        local_order: direct.order(),
        delta: delta(&diff)?,
        period,
        index,
    })
}

impl DifferenceCertificate {
    pub fn recompute(&self) -> Result<Self> {
        let e = catalog_curve(&self.curve_id)?;
        let seq = rebuild_sequence(e, self.p, &self.pairs, &self.s_k, SearchParams { bound: 0, seed: 0 })?;
        check_difference_order(self.i, self.j, &seq)
    }

    pub fn verify(&self) -> Result<()> {
        compare(self, &self.recompute()?)
    }
}
