//! Classes of period P and index P·D from a single prime pair.

use serde::{Deserialize, Serialize};

use super::certificate::{compare, Index, LedgerEntry, Period, VERSION};
use super::conditions::{check_sc, Evidence};
use super::galois::PairRepr;
use super::search::PrimePairCertificate;
use crate::arith::{EisInt, EisPrime, FieldElem, FieldId, Place};
use crate::brauer::BrauerClass;
use crate::elliptic::{curve as catalog_curve, Point};
use crate::error::{Error, Result};
use crate::obstruction::{delta, delta_at, iota, kappa0, phi, KummerClass};

/// ξ = Φ(π^{P/D}, π′).
pub fn build_theorem1_class(cert: &PrimePairCertificate, d: u32) -> Result<KummerClass> {
    let p = cert.p;
    if d == 0 || !p.is_multiple_of(d) {
        return Err(Error::Invalid(format!("D = {d} does not divide P = {p}")));
    }
    let e = catalog_curve(&cert.curve_id)?;
    let a = FieldElem::from_eis(&cert.pi)?.pow((p / d) as i64);
    phi(&a, &FieldElem::from_eis(&cert.pi_prime)?, p, e)
}

fn proper_divisors(p: u32) -> Vec<u32> {
    (1..p).filter(|d| p.is_multiple_of(*d)).collect()
}

/// The period of the image of ξ in H¹(K, E), from the least P′ | P with
/// P′ξ in the Kummer image of E(K). A multiple P′ξ ramified at one of
/// `ramified_at` is excluded directly; otherwise membership is decided
/// against the images of the finite group E(K).
pub fn period_of(xi: &KummerClass, ramified_at: &[EisPrime]) -> Result<Period> {
    let e = xi.curve()?;
    let p = xi.level;
    let mut premises = Vec::new();
    let finite = e.mordell_weil.rank == 0;
    let images: Vec<(Point, KummerClass)> = if finite {
        e.torsion_table()
            .into_iter()
            .map(|(_, x)| Ok((x.clone(), iota(e, &x)?)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut used_ramification = false;
    let mut used_membership = false;
    for d in proper_divisors(p) {
        let y = xi.scale(d as i64);
        let ram = ramified_at.iter().find_map(|v| {
            let (va, vb) = (y.a.valuation(v), y.b.valuation(v));
            (va.rem_euclid(p as i64) != 0 || vb.rem_euclid(p as i64) != 0).then_some((v, va, vb))
        });
        if let Some((v, va, vb)) = ram {
            used_ramification = true;
            premises.push(LedgerEntry::checked(
                format!("period does not divide {d}"),
                format!("{d}xi has valuations ({va}, {vb}) at {v}, not both divisible by {p}: ramified there"),
            ));
            continue;
        }
        if !finite {
            return Err(Error::Inconclusive(format!(
                "{d}xi is unramified at the test places and E(K) is infinite"
            )));
        }
        used_membership = true;
        if let Some((x, _)) = images.iter().find(|(_, im)| *im == y) {
            premises.push(LedgerEntry::checked(
                format!("period divides {d}"),
                format!("{d}xi is the Kummer image of {x}"),
            ));
            push_external(&mut premises, used_ramification, used_membership, e.mordell_weil.citation.as_str());
            return Ok(Period { value: d, premises });
        }
        premises.push(LedgerEntry::checked(
            format!("period does not divide {d}"),
            format!("{d}xi differs from all {} Kummer images of E(K)", images.len()),
        ));
    }
    push_external(&mut premises, used_ramification, used_membership, e.mordell_weil.citation.as_str());
    premises.push(LedgerEntry::checked(format!("period divides {p}"), format!("xi has level {p}")));
    Ok(Period { value: p, premises })
}

fn push_external(premises: &mut Vec<LedgerEntry>, ram: bool, member: bool, citation: &str) {
    if ram {
        premises.push(LedgerEntry::external(
            "Kummer images of E(K) are unramified at good places prime to P",
            "Silverman, The Arithmetic of Elliptic Curves, Prop. VIII.2.1",
        ));
    }
    if member {
        premises.push(LedgerEntry::external("the catalog lists all of E(K)", citation));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalOrder {
    pub place: Place,
    pub order: u64,
}

/// The relative Brauer data, with the index bound kept apart from
/// the value it is compared against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeBrauerSummary {
    pub kappa0_size: usize,
    pub quotient_order: u64,
    pub min_lift_order: u64,
    pub best_lift: Point,
    /// P times the least Δ-order over Kummer lifts: an upper bound for I.
    pub index_bound: u64,
    pub equality_observed: bool,
}

pub fn relative_brauer_summary(xi: &KummerClass) -> Result<RelativeBrauerSummary> {
    let r = kappa0(xi)?;
    Ok(RelativeBrauerSummary {
        kappa0_size: r.kappa0.len(),
        quotient_order: r.quotient_order,
        min_lift_order: r.min_lift_order,
        best_lift: r.best_lift,
        index_bound: xi.level as u64 * r.min_lift_order,
        equality_observed: r.attained,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCertificate {
    pub version: u32,
    pub field: FieldId,
    pub curve_id: String,
    #[serde(rename = "P")]
    pub p: u32,
    #[serde(rename = "D")]
    pub d: u32,
    pub pi: EisInt,
    pub pi_prime: EisInt,
    pub evidence: Vec<Evidence>,
    pub class: PairRepr,
    pub delta: BrauerClass,
    pub local_orders: Vec<LocalOrder>,
    pub period: Period,
    pub index: Index,
    pub relative_brauer: RelativeBrauerSummary,
}

/// Certifies period P and index P·D for ξ = Φ(π^{P/D}, π′).
pub fn certify_index_theorem1(xi: &KummerClass, cert: &PrimePairCertificate, d: u32) -> Result<IndexCertificate> {
    let e = catalog_curve(&cert.curve_id)?;
    let p = cert.p;
    let evidence = check_sc(&cert.pi, &cert.pi_prime, e, p)?;
    if evidence != cert.evidence {
        return Err(Error::Verification("pair evidence differs from its recomputation".into()));
    }
    if *xi != build_theorem1_class(cert, d)? {
        return Err(Error::Invalid("class is not built from this pair".into()));
    }
    let (v, vp) = (cert.v()?, cert.v_prime()?);
    let period = period_of(xi, &[vp])?;
    if period.value != p {
        return Err(Error::Verification(format!("period {} is not {p}", period.value)));
    }
    let dl = delta(xi)?;
    let allowed = [Place::Eisenstein(v), Place::Eisenstein(vp)];
    if let Some(w) = dl.places().iter().find(|w| !allowed.contains(w)) {
        return Err(Error::Verification(format!("obstruction is nonzero at {w}, outside the pair")));
    }
    let local_orders = vec![
        LocalOrder { place: allowed[0], order: delta_at(xi, &v)?.order() },
        LocalOrder { place: allowed[1], order: delta_at(xi, &vp)?.order() },
    ];
    if local_orders[0].order != d as u64 {
        return Err(Error::Verification(format!(
            "local order {} at {v}, expected {d}",
            local_orders[0].order
        )));
    }
    if !dl.scale(d as i64).is_zero() {
        return Err(Error::Verification(format!("{d} * obstruction is nonzero")));
    }
    let mut ledger = vec![
        LedgerEntry::checked(
            "obstruction supported at the pair",
            format!("support of the obstruction: {dl}; every place tested including (1-w)"),
        ),
        LedgerEntry::checked(
            format!("obstruction has order {d} at {v}"),
            format!("power-residue order of pi_prime at {v} is {p}, and pi enters with exponent {}", p / d),
        ),
        LedgerEntry::checked(format!("{d} * obstruction = 0"), "evaluated place by place"),
        LedgerEntry::theorem(
            format!("index divides {}", p * d),
            format!("the level-{} obstruction of j(xi) is {d} times that of xi and vanishes, giving a rational divisor of degree {}", p * d, p * d),
        ),
        LedgerEntry::checked(
            "locally trivial at bad places",
            "pi and pi_prime are cubes at every bad place (SC3 evidence), so xi restricts to 0 there",
        ),
        LedgerEntry::external(
            "locally trivial at good places away from the pair",
            "restriction to the maximal unramified extension is injective on H^1(K_w, E)[P] (Lang-Tate)",
        ),
        LedgerEntry::theorem(format!("index divisible by {p}"), "the period divides the index"),
    ];
    if d == 1 {
        ledger.push(LedgerEntry::checked("obstruction vanishes", "Delta(xi) = 0 at every place"));
        ledger.push(LedgerEntry::theorem(
            format!("index equals {p}"),
            "a Kummer lift with vanishing obstruction yields a rational divisor of degree P",
        ));
    } else {
        let sc2 = evidence.iter().find(|x| x.condition == "SC2").map(|x| x.value.clone()).unwrap_or_default();
        ledger.push(LedgerEntry::checked(
            format!("E(K) is {p}-divisible in E(K_v) at {v}"),
            format!("SC2 evidence: {sc2}"),
        ));
        ledger.push(LedgerEntry::theorem(
            format!("index equals {}", p * d),
            format!(
                "a lift of smaller index would make (I/P) times the obstruction vanish at {v} by local duality, \
                 contradicting order {d} there and reciprocity with the single other place {vp}"
            ),
        ));
    }
    let value = p * d;
    let index = Index { value, lower_bound: value, upper_bound: value, ledger };
    index.check(p)?;
    Ok(IndexCertificate {
        version: VERSION,
        field: e.field,
        curve_id: e.id.clone(),
        p,
        d,
        pi: cert.pi,
        pi_prime: cert.pi_prime,
        evidence,
        class: xi.into(),
        delta: dl,
        local_orders,
        period,
        index,
        relative_brauer: relative_brauer_summary(xi)?,
    })
}

impl IndexCertificate {
    fn pair(&self) -> PrimePairCertificate {
        PrimePairCertificate {
            version: self.version,
            field: self.field,
            curve_id: self.curve_id.clone(),
            p: self.p,
            pi: self.pi,
            pi_prime: self.pi_prime,
            evidence: self.evidence.clone(),
            search: super::search::SearchParams { bound: 0, seed: 0 },
        }
    }

    /// Rebuilds every machine-checked entry from the stored pair.
    pub fn recompute(&self) -> Result<Self> {
        let mut pair = self.pair();
        let e = catalog_curve(&self.curve_id)?;
        pair.evidence = check_sc(&self.pi, &self.pi_prime, e, self.p)?;
        let xi = build_theorem1_class(&pair, self.d)?;
        certify_index_theorem1(&xi, &pair, self.d)
    }

    pub fn verify(&self) -> Result<()> {
        compare(self, &self.recompute()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::search::{search_prime_pair, SearchOutcome};
    use crate::elliptic::fermat_cubic;

    fn pair() -> PrimePairCertificate {
        match search_prime_pair(fermat_cubic(), 3, 20_000, 0).unwrap() {
            SearchOutcome::Found(c) => c,
            SearchOutcome::Exhausted(_) => panic!("no pair"),
        }
    }

    #[test]
    fn builder_exponents() {
        let c = pair();
        let e = fermat_cubic();
        let pi = FieldElem::from_eis(&c.pi).unwrap();
        let pp = FieldElem::from_eis(&c.pi_prime).unwrap();
        assert_eq!(build_theorem1_class(&c, 3).unwrap(), phi(&pi, &pp, 3, e).unwrap());
        assert_eq!(build_theorem1_class(&c, 1).unwrap(), phi(&FieldElem::one(), &pp, 3, e).unwrap());
        assert!(build_theorem1_class(&c, 2).is_err());
    }

    #[test]
    fn periods() {
        let c = pair();
        let vp = c.v_prime().unwrap();
        for d in [1, 3] {
            let xi = build_theorem1_class(&c, d).unwrap();
            assert_eq!(period_of(&xi, &[vp]).unwrap().value, 3);
        }
        let zero = KummerClass::zero(fermat_cubic(), 3).unwrap();
        assert_eq!(period_of(&zero, &[vp]).unwrap().value, 1);
        // Kummer images have period 1 without any ramification
        let x = fermat_cubic().t.clone();
        let im = iota(fermat_cubic(), &x).unwrap();
        assert_eq!(period_of(&im, &[vp]).unwrap().value, 1);
    }

    #[test]
    fn certificates_for_both_d() {
        let c = pair();
        let xi = build_theorem1_class(&c, 3).unwrap();
        let cert = certify_index_theorem1(&xi, &c, 3).unwrap();
        assert_eq!((cert.period.value, cert.index.value), (3, 9));
        assert_eq!(cert.local_orders[0].order, 3);
        cert.verify().unwrap();
        let xi1 = build_theorem1_class(&c, 1).unwrap();
        let cert1 = certify_index_theorem1(&xi1, &c, 1).unwrap();
        assert!(cert1.delta.is_zero());
        assert_eq!(cert1.index.value, 3);
        cert1.verify().unwrap();
    }

    #[test]
    fn tampered_evidence_fails() {
        let c = pair();
        let xi = build_theorem1_class(&c, 3).unwrap();
        let mut cert = certify_index_theorem1(&xi, &c, 3).unwrap();
        let sc4 = cert.evidence.iter_mut().find(|x| x.condition == "SC4").unwrap();
        sc4.value = "1".into();
        assert!(matches!(cert.verify(), Err(Error::Verification(_))));
    }
}
