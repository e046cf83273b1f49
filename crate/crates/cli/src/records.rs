//! Output records, each tagged by `kind`, and their recomputation for
//! `verify`.

use period_index::arith::eis::DEFAULT_NORM_CAP;
use period_index::brauer::BrauerClass;
use period_index::construct::certificate::{Period, VERSION};
use period_index::construct::search::{search_prime_pair, ExhaustionReport, PrimePairCertificate, SearchOutcome};
use period_index::construct::theorem1::{
    build_theorem1_class, certify_index_theorem1, period_of, relative_brauer_summary, IndexCertificate,
    RelativeBrauerSummary,
};
use period_index::construct::theorem2::{
    build_theorem2_sequence, check_difference_order, DifferenceCertificate, SequenceCertificate,
};
use period_index::construct::theorem3::{splitting_plan_theorem3, SplittingPlan};
use period_index::descent2::{
    conic_local_solvable, torsor_local_solvable, two_covering_torsor, versal_pair, LocalEntry, Solvability,
};
use period_index::elliptic::curve;
use period_index::obstruction::{delta, KummerClass};
use period_index::symbols::{
    hilbert2_global, hilbert2_local, local_symbol, reciprocity_suite, symbol_global, symbol_local_tame, Rat,
    ReciprocitySuite,
};
use period_index::{Error, FieldElem, Place, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// A theorem-1 class with its obstruction, period and relative Brauer data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub version: u32,
    pub pair: PrimePairCertificate,
    #[serde(rename = "D")]
    pub d: u32,
    pub class: KummerClass,
    pub delta: BrauerClass,
    pub period: Period,
    pub relative_brauer: RelativeBrauerSummary,
}

pub fn class_record(pair: &PrimePairCertificate, d: u32) -> Result<ClassRecord> {
    let pair = pair.recompute_checked()?;
    let xi = build_theorem1_class(&pair, d)?;
    Ok(ClassRecord {
        version: VERSION,
        period: period_of(&xi, &[pair.v_prime()?])?,
        delta: delta(&xi)?,
        relative_brauer: relative_brauer_summary(&xi)?,
        class: xi,
        pair,
        d,
    })
}

trait Checked: Sized {
    fn recompute_checked(&self) -> Result<Self>;
}

impl Checked for PrimePairCertificate {
    /// The pair as given, refused when its evidence does not recompute.
    fn recompute_checked(&self) -> Result<Self> {
        let again = self.recompute()?;
        if again != *self {
            return Err(Error::Verification("pair evidence differs from its recomputation".into()));
        }
        Ok(again)
    }
}

pub fn index_certificate(pair: &PrimePairCertificate, d: u32) -> Result<IndexCertificate> {
    let pair = pair.recompute_checked()?;
    certify_index_theorem1(&build_theorem1_class(&pair, d)?, &pair, d)
}

/// The request behind an exhausted search, kept so `verify` can rerun it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum SearchRequest {
    SearchPrimes {
        curve_id: String,
        #[serde(rename = "P")]
        p: u32,
        bound: u64,
        seed: u64,
    },
    Sequence {
        curve_id: String,
        #[serde(rename = "P")]
        p: u32,
        r: usize,
        s_k: Vec<u64>,
        bound: u64,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionRecord {
    pub request: SearchRequest,
    pub report: ExhaustionReport,
}

pub enum Searched {
    Pair(PrimePairCertificate),
    Sequence(SequenceCertificate),
    Exhausted(ExhaustionRecord),
}

pub fn run_search(req: &SearchRequest) -> Result<Searched> {
    let out = match req {
        SearchRequest::SearchPrimes { curve_id, p, bound, seed } => {
            match search_prime_pair(curve(curve_id)?, *p, *bound, *seed)? {
                SearchOutcome::Found(c) => Searched::Pair(c),
                SearchOutcome::Exhausted(report) => Searched::Exhausted(ExhaustionRecord { request: req.clone(), report }),
            }
        }
        SearchRequest::Sequence { curve_id, p, r, s_k, bound, seed } => {
            match build_theorem2_sequence(curve(curve_id)?, *p, *r, s_k, *bound, *seed)? {
                SearchOutcome::Found(c) => Searched::Sequence(c),
                SearchOutcome::Exhausted(report) => Searched::Exhausted(ExhaustionRecord { request: req.clone(), report }),
            }
        }
    };
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolRecord {
    pub version: u32,
    pub n: u64,
    pub a: String,
    pub b: String,
    pub norm_cap: u64,
    pub place: Option<Place>,
    /// The local invariant k/n at `place`.
    pub invariant: Option<String>,
    pub order: Option<u64>,
    /// The class over all places, when no single place was asked for.
    pub class: Option<BrauerClass>,
}

fn parse_place(s: &str) -> Result<Place> {
    let s = s.trim();
    if s.starts_with('(') || s == "inf" || s == "real" || s.chars().all(|c| c.is_ascii_digit()) {
        return s.parse();
    }
    Place::eisenstein(s.parse()?)
}

pub fn parse_places(s: &str) -> Result<Vec<Place>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_place).collect()
}

fn parse_rat(s: &str) -> Result<Rat> {
    let r: Rat = s.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if r == Rat::from_integer(0) {
        return Err(Error::Zero);
    }
    Ok(r)
}

pub fn symbol_record(n: u64, a: &str, b: &str, place: Option<&str>, norm_cap: u64) -> Result<SymbolRecord> {
    if n < 2 {
        return Err(Error::Invalid(format!("level {n} is below 2")));
    }
    let place = place.map(parse_place).transpose()?;
    let (invariant, class) = if n == 2 {
        let (x, y) = (parse_rat(a)?, parse_rat(b)?);
        match &place {
            Some(v) => (Some(hilbert2_local(&x, &y, v)?), None),
            None => (None, Some(hilbert2_global(&x, &y)?)),
        }
    } else {
        let (x, y) = (FieldElem::parse_with_cap(a, norm_cap as u128)?, FieldElem::parse_with_cap(b, norm_cap as u128)?);
        match &place {
            Some(Place::Eisenstein(v)) => (Some(local_symbol(&x, &y, v, n)?), None),
            Some(v) => return Err(Error::Invalid(format!("{v} is not a place of Q(zeta3); write primes as a+bw"))),
            None if n == 3 => (None, Some(symbol_global(&x, &y, 3)?)),
            None => (None, Some(symbol_local_tame(&x, &y, n)?)),
        }
    };
    Ok(SymbolRecord {
        version: VERSION,
        n,
        a: a.to_string(),
        b: b.to_string(),
        norm_cap,
        place,
        invariant: invariant.map(|x| x.to_string()),
        order: invariant.map(|x| x.order()),
        class,
    })
}

/// Inputs accepted by `local-solve`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum LocalInput {
    /// a x² + b y² = z².
    Conic { a: String, b: String },
    /// The 2-covering of y² = (x − e₁)(x − e₂)(x − e₃) attached to (a, b).
    Torsor { roots: [String; 3], a: i64, b: i64 },
    Versal { t: [i64; 8] },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSolveRecord {
    pub version: u32,
    pub input: LocalInput,
    pub equations: Vec<String>,
    pub table: Vec<LocalEntry>,
    pub everywhere_locally_solvable: Option<bool>,
}

pub fn local_solve(input: &LocalInput, places: &[Place]) -> Result<LocalSolveRecord> {
    let (equations, table) = match input {
        LocalInput::Conic { a, b } => {
            let (x, y) = (parse_rat(a)?, parse_rat(b)?);
            let table = places
                .iter()
                .map(|v| {
                    let ok = conic_local_solvable(&x, &y, v)?;
                    Ok(LocalEntry { place: *v, result: if ok { Solvability::Solvable } else { Solvability::Unsolvable } })
                })
                .collect::<Result<Vec<_>>>()?;
            (vec![format!("({x}) x^2 + ({y}) y^2 = z^2")], table)
        }
        LocalInput::Torsor { roots, a, b } => {
            let e = [parse_rat(&roots[0]).or_else(zero_ok)?, parse_rat(&roots[1]).or_else(zero_ok)?, parse_rat(&roots[2]).or_else(zero_ok)?];
            pair_table(&two_covering_torsor(e, *a, *b)?, places)?
        }
        LocalInput::Versal { t } => pair_table(&versal_pair(*t)?, places)?,
    };
    let flag = if table.iter().any(|x| x.result == Solvability::Unsolvable) {
        Some(false)
    } else if table.iter().all(|x| x.result == Solvability::Solvable) {
        Some(true)
    } else {
        None
    };
    Ok(LocalSolveRecord { version: VERSION, input: input.clone(), equations, table, everywhere_locally_solvable: flag })
}

fn zero_ok(e: Error) -> Result<Rat> {
    match e {
        Error::Zero => Ok(Rat::from_integer(0)),
        e => Err(e),
    }
}

fn pair_table(q: &period_index::descent2::QuadricPair, places: &[Place]) -> Result<(Vec<String>, Vec<LocalEntry>)> {
    let table = places
        .iter()
        .map(|v| Ok(LocalEntry { place: *v, result: torsor_local_solvable(q, v)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok((q.equations().to_vec(), table))
}

/// The default place list: the real place and every rational prime up to
/// `limit`.
pub fn places_up_to(limit: u64) -> Vec<Place> {
    std::iter::once(Place::Real)
        .chain((2..=limit).filter_map(|p| Place::rational(p).ok()))
        .collect()
}

/// A kinded JSON object with `kind` first and the body fields after it.
pub fn tagged<T: Serialize>(kind: &str, body: &T) -> Result<Value> {
    let v = serde_json::to_value(body).map_err(|e| Error::Invalid(e.to_string()))?;
    let Value::Object(fields) = v else {
        return Err(Error::Invalid(format!("{kind} body is not an object")));
    };
    let mut m = Map::new();
    m.insert("kind".into(), Value::String(kind.into()));
    m.extend(fields);
    Ok(Value::Object(m))
}

pub fn untag<T: DeserializeOwned>(v: &Value, kind: &str) -> Result<T> {
    let found = v.get("kind").and_then(Value::as_str);
    if found != Some(kind) {
        return Err(Error::Verification(format!("expected a {kind} document, found kind {found:?}")));
    }
    let mut body = v.clone();
    if let Value::Object(m) = &mut body {
        m.remove("kind");
    }
    serde_json::from_value(body).map_err(|e| Error::Verification(format!("malformed {kind}: {e}")))
}

/// Recomputes a document from its own inputs. The document is accepted when
/// the recomputation serializes to exactly the same JSON.
pub fn recompute(doc: &Value) -> Result<Value> {
    let kind = doc
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Verification("document has no kind".into()))?;
    match kind {
        "prime-pair" => tagged(kind, &untag::<PrimePairCertificate>(doc, kind)?.recompute()?),
        "exhaustion-report" => {
            let r: ExhaustionRecord = untag(doc, kind)?;
            match run_search(&r.request)? {
                Searched::Exhausted(again) => tagged(kind, &again),
                _ => Err(Error::Verification("the recorded search succeeds when rerun".into())),
            }
        }
        "theorem1-class" => {
            let r: ClassRecord = untag(doc, kind)?;
            tagged(kind, &class_record(&r.pair, r.d)?)
        }
        "index-certificate" => tagged(kind, &untag::<IndexCertificate>(doc, kind)?.recompute()?),
        "sequence" => tagged(kind, &untag::<SequenceCertificate>(doc, kind)?.recompute()?),
        "difference-certificate" => tagged(kind, &untag::<DifferenceCertificate>(doc, kind)?.recompute()?),
        "splitting-plan" => tagged(kind, &untag::<SplittingPlan>(doc, kind)?.recompute()?),
        "symbol" => {
            let r: SymbolRecord = untag(doc, kind)?;
            let place = r.place.map(|p| p.to_string());
            tagged(kind, &symbol_record(r.n, &r.a, &r.b, place.as_deref(), r.norm_cap)?)
        }
        "reciprocity-suite" => {
            let r: ReciprocitySuite = untag(doc, kind)?;
            tagged(kind, &reciprocity_suite(r.n, r.count, r.seed)?)
        }
        "local-solve" => {
            let r: LocalSolveRecord = untag(doc, kind)?;
            let places: Vec<Place> = r.table.iter().map(|x| x.place).collect();
            tagged(kind, &local_solve(&r.input, &places)?)
        }
        _ => Err(Error::Verification(format!("{kind:?} is not a certificate kind"))),
    }
}

pub fn difference(seq: &SequenceCertificate, i: usize, j: usize) -> Result<DifferenceCertificate> {
    check_difference_order(i, j, &seq.recompute_checked()?)
}

pub fn plan(seq: &SequenceCertificate, r: usize) -> Result<SplittingPlan> {
    splitting_plan_theorem3(&seq.recompute_checked()?, r)
}

impl Checked for SequenceCertificate {
    fn recompute_checked(&self) -> Result<Self> {
        self.verify()?;
        Ok(self.clone())
    }
}

pub const DEFAULT_CAP: u64 = DEFAULT_NORM_CAP as u64;

