//! End-to-end acceptance checks, one PASS/FAIL line each.
//!
//! Run with `cargo test -p period-index --test acceptance`. Set
//! `FREEZE_FIXTURES=1` to rewrite the byte-level fixtures under
//! `tests/fixtures` instead of comparing against them.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use period_index::arith::eis::{is_prime_u64, primes_above_split};
use period_index::construct::search::{search_prime_pair, PrimePairCertificate, SearchOutcome};
use period_index::construct::theorem1::{build_theorem1_class, certify_index_theorem1, IndexCertificate};
use period_index::construct::theorem2::{build_theorem2_sequence, check_difference_order, SequenceCertificate};
use period_index::construct::theorem3::splitting_plan_theorem3;
use period_index::construct::certificate::Trust;
use period_index::descent2::conic_local_solvable;
use period_index::elliptic::{fermat_cubic, Point};
use period_index::obstruction::{delta, delta_at, iota, kappa0, li_pairing, lift_level, phi, push_level, KummerClass};
use period_index::symbols::{hilbert2_local, reciprocity_suite, tame_symbol, Rat};
use period_index::{EisInt, EisPrime, FieldElem, Place};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Check = fn(&mut Fixtures) -> Result<String, String>;

/// Results shared between criteria so the searches run once.
#[derive(Default)]
struct Fixtures {
    pair: Option<PrimePairCertificate>,
    certs: Vec<IndexCertificate>,
    seq: Option<SequenceCertificate>,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn squarefree(n: i64) -> bool {
    let n = n.unsigned_abs();
    (2..=n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d * d))
}

fn c1_hilbert_vs_conics(_: &mut Fixtures) -> Result<String, String> {
    let vals: Vec<i64> = (-50..=50).filter(|x| *x != 0 && squarefree(*x)).collect();
    let mut places = vec![Place::Real];
    places.extend((2..100).filter(|p| is_prime_u64(*p)).map(Place::Rational));
    let pairs: Vec<(i64, i64)> = vals.iter().flat_map(|a| vals.iter().map(move |b| (*a, *b))).collect();
    let mismatches: Vec<String> = pairs
        .par_iter()
        .flat_map_iter(|(a, b)| {
            let (ra, rb) = (Rat::from_integer(*a), Rat::from_integer(*b));
            places.iter().filter_map(move |v| {
                let h = hilbert2_local(&ra, &rb, v).expect("nonzero inputs");
                let conic = conic_local_solvable(&ra, &rb, v).expect("conic search settles");
                (h.is_zero() != conic).then(|| format!("({a}, {b}) at {v}"))
            })
        })
        .collect();
    ensure(mismatches.is_empty(), || format!("mismatches: {:?}", &mismatches[..mismatches.len().min(5)]))?;
    Ok(format!("{} pairs x {} places, 0 mismatches", pairs.len(), places.len()))
}

/// The residue of ω at v: the root r of x² + x + 1 with v | r − ω.
fn omega_residue(v: &EisPrime) -> u64 {
    let p = v.norm();
    let conj = v.value().conj();
    (0..p)
        .find(|r| {
            let x = EisInt::new(*r as i128, -1) * conj;
            x.a.rem_euclid(p as i128) == 0 && x.b.rem_euclid(p as i128) == 0
        })
        .expect("split prime has a root")
}

fn c2_tame_vs_cubes(_: &mut Fixtures) -> Result<String, String> {
    let primes: Vec<u64> = (7..10_000).filter(|p| p % 3 == 1 && is_prime_u64(*p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut zeros = 0;
    for _ in 0..500 {
        let p = primes[rng.gen_range(0..primes.len())];
        let v = primes_above_split(p)[rng.gen_range(0..2)];
        let r = omega_residue(&v);
        let residue = |x: &EisInt| (x.a + x.b * r as i128).rem_euclid(p as i128) as u64;
        let draw = |rng: &mut ChaCha8Rng| loop {
            let x = EisInt::new(rng.gen_range(-300..=300), rng.gen_range(-300..=300));
            if residue(&x) != 0 {
                return x;
            }
        };
        let u = draw(&mut rng);
        let s = draw(&mut rng);
        let uniformizer = FieldElem::prime(&v).mul(&FieldElem::from_eis(&s).unwrap());
        let sym = tame_symbol(&FieldElem::from_eis(&u).unwrap(), &uniformizer, &v, 3).map_err(|e| e.to_string())?;
        let cubes: HashSet<u64> = (1..p).map(|x| x * x % p * x % p).collect();
        let is_cube = cubes.contains(&residue(&u));
        ensure(sym.is_zero() == is_cube, || format!("u = {u} at {v}: symbol {sym}, cube {is_cube}"))?;
        zeros += is_cube as usize;
    }
    Ok(format!("500 pairs, {zeros} cubes, 0 mismatches"))
}

fn c3_reciprocity(_: &mut Fixtures) -> Result<String, String> {
    let mut parts = Vec::new();
    for n in [2, 3] {
        let s = reciprocity_suite(n, 200, 3).map_err(|e| e.to_string())?;
        ensure(s.failures == 0, || format!("level {n}: {} failures", s.failures))?;
        let nonzero = s.samples.iter().filter(|x| !x.class.is_zero()).count();
        parts.push(format!("level {n}: 200 sums zero ({nonzero} nonzero classes)"));
    }
    Ok(parts.join(", "))
}

fn pair(f: &mut Fixtures) -> Result<PrimePairCertificate, String> {
    if f.pair.is_none() {
        match search_prime_pair(fermat_cubic(), 3, 100_000, 0).map_err(|e| e.to_string())? {
            SearchOutcome::Found(c) => f.pair = Some(c),
            SearchOutcome::Exhausted(r) => return Err(format!("search exhausted at {}", r.stage)),
        }
    }
    Ok(f.pair.clone().unwrap())
}

fn sequence(f: &mut Fixtures) -> Result<SequenceCertificate, String> {
    if f.seq.is_none() {
        match build_theorem2_sequence(fermat_cubic(), 3, 2, &[2, 3, 5], 300_000, 0).map_err(|e| e.to_string())? {
            SearchOutcome::Found(s) => f.seq = Some(s),
            SearchOutcome::Exhausted(r) => return Err(format!("sequence exhausted at {}", r.stage)),
        }
    }
    Ok(f.seq.clone().unwrap())
}

/// Theorem-1 classes for D = 3 and 1, the two sequence classes and their
/// difference.
fn constructed(f: &mut Fixtures) -> Result<Vec<KummerClass>, String> {
    let p = pair(f)?;
    let s = sequence(f)?;
    let e = |x: period_index::Error| x.to_string();
    let (t1, t2) = (s.class(1).map_err(e)?, s.class(2).map_err(e)?);
    Ok(vec![
        build_theorem1_class(&p, 3).map_err(e)?,
        build_theorem1_class(&p, 1).map_err(e)?,
        t1.clone(),
        t2.clone(),
        t1.sub(&t2).map_err(e)?,
    ])
}

fn c4_lichtenbaum(f: &mut Fixtures) -> Result<String, String> {
    let e = fermat_cubic();
    let pts: Vec<Point> = e.torsion_table().into_iter().map(|(_, p)| p).collect();
    ensure(pts.len() == 9, || format!("{} rational points", pts.len()))?;
    for x in &pts {
        let d = delta(&iota(e, x).unwrap()).unwrap();
        ensure(d.is_zero(), || format!("obstruction of iota({x}) is {d}"))?;
    }
    let classes = constructed(f)?;
    for xi in &classes {
        let li: Vec<_> = pts.iter().map(|x| li_pairing(xi, x).unwrap()).collect();
        for (i, x) in pts.iter().enumerate() {
            for (j, y) in pts.iter().enumerate() {
                let lhs = li_pairing(xi, &e.curve.add(x, y)).unwrap();
                ensure(lhs == li[i].add(&li[j]), || format!("Li not additive at ({x}, {y})"))?;
            }
        }
    }
    Ok(format!("{} classes, 81 entries each, obstruction zero on 9 Kummer images", classes.len()))
}

fn c5_functoriality(_: &mut Fixtures) -> Result<String, String> {
    let e = fermat_cubic();
    let primes: Vec<EisPrime> =
        (19u64..2000).filter(|p| p % 9 == 1 && is_prime_u64(*p)).flat_map(primes_above_split).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = 0;
    for _ in 0..50 {
        let pick = |rng: &mut ChaCha8Rng| {
            let v = primes[rng.gen_range(0..primes.len())];
            let w = primes[rng.gen_range(0..primes.len())];
            FieldElem::prime(&v).pow(rng.gen_range(1..9)).mul(&FieldElem::prime(&w).pow(rng.gen_range(0..9)))
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let xi = phi(&a, &b, 3, e).unwrap();
        let eta = phi(&a, &b, 9, e).unwrap();
        let j = lift_level(&xi, 3).unwrap();
        let pushed = push_level(&eta, 3).unwrap();
        let support: Vec<EisPrime> = a.support().chain(b.support()).copied().collect();
        for v in &support {
            let lhs = delta_at(&j, v).unwrap();
            let rhs = delta_at(&xi, v).unwrap().scale(3);
            ensure(lhs == rhs, || format!("lift at {v}: {lhs} vs {rhs}"))?;
            let lhs = delta_at(&pushed, v).unwrap();
            let rhs = delta_at(&eta, v).unwrap().scale(3);
            ensure(lhs == rhs, || format!("push at {v}: {lhs} vs {rhs}"))?;
            checks += 2;
        }
    }
    Ok(format!("50 classes, {checks} place checks"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn c6_theorem1(f: &mut Fixtures) -> Result<String, String> {
    let p = pair(f)?;
    let (v, vp) = (Place::Eisenstein(p.v().unwrap()), Place::Eisenstein(p.v_prime().unwrap()));
    let mut certs = Vec::new();
    for d in [3, 1] {
        let xi = build_theorem1_class(&p, d).map_err(|e| e.to_string())?;
        let c = certify_index_theorem1(&xi, &p, d).map_err(|e| e.to_string())?;
        ensure(c.period.value == 3, || format!("D = {d}: period {}", c.period.value))?;
        ensure(c.period.premises.iter().any(|x| x.trust == Trust::MachineChecked), || "period unchecked".into())?;
        ensure(c.delta.places().iter().all(|w| *w == v || *w == vp), || format!("support {}", c.delta))?;
        let at_v = c.local_orders.iter().find(|x| x.place == v).map(|x| x.order);
        let ledger = &c.index.ledger;
        if d == 3 {
            ensure(at_v == Some(3), || format!("order at v is {at_v:?}"))?;
            ensure(c.index.value == 9, || format!("index {}", c.index.value))?;
            ensure(
                ledger.iter().any(|x| x.trust == Trust::TheoremSupplied && x.claim == "index equals 9"),
                || "no theorem-supplied lower bound".into(),
            )?;
            ensure(
                ledger.iter().any(|x| x.trust == Trust::MachineChecked && x.claim == "3 * obstruction = 0"),
                || "no machine-checked upper bound".into(),
            )?;
        } else {
            ensure(c.delta.is_zero(), || format!("D = 1 obstruction {}", c.delta))?;
            ensure(c.index.value == 3, || format!("index {}", c.index.value))?;
        }
        let text = serde_json::to_string(&c).unwrap();
        let back: IndexCertificate = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        back.verify().map_err(|e| format!("round trip D = {d}: {e}"))?;
        certs.push(c);
    }
    f.certs = certs;
    Ok(format!("pair ({}, {}), indices 9 and 3, both verify", p.pi, p.pi_prime))
}

fn c7_theorem2(f: &mut Fixtures) -> Result<String, String> {
    let s = sequence(f)?;
    ensure(s.entries.len() == 2, || format!("{} pairs", s.entries.len()))?;
    s.verify().map_err(|e| e.to_string())?;
    let d = check_difference_order(1, 2, &s).map_err(|e| e.to_string())?;
    ensure(d.local_order == 3, || format!("difference order {}", d.local_order))?;
    d.verify().map_err(|e| e.to_string())?;
    let mut outcomes = Vec::new();
    for x in &s.entries {
        let r = &x.invariance;
        ensure(r.verbatim_invariant || r.det_discrepancy, || format!("entry {}: silent invariance failure", x.index))?;
        outcomes.push(if r.det_discrepancy { "discrepancy reported" } else { "invariant" });
    }
    Ok(format!("difference has order 3 at {}; invariance: {}", d.place, outcomes.join(", ")))
}

fn c8_theorem3(f: &mut Fixtures) -> Result<String, String> {
    let s = sequence(f)?;
    let plan = splitting_plan_theorem3(&s, 2).map_err(|e| e.to_string())?;
    for r in &plan.restrictions {
        ensure(r.restricted.is_zero(), || format!("class {} survives restriction", r.index))?;
    }
    ensure(plan.places.iter().all(|p| p.ramification == 3), || "ramification is not 3".into())?;
    ensure(!plan.distinctness.is_empty(), || "no distinctness premise".into())?;
    plan.verify().map_err(|e| e.to_string())?;
    Ok(format!(
        "{} restrictions vanish over {} places, {} distinctness checks re-verify",
        plan.restrictions.len(),
        plan.place_count,
        plan.distinctness.len()
    ))
}

fn c9_relative_brauer(f: &mut Fixtures) -> Result<String, String> {
    let classes = constructed(f)?;
    for xi in &classes {
        let r = kappa0(xi).map_err(|e| e.to_string())?;
        ensure(r.quotient_order == r.min_lift_order, || {
            format!("quotient {} vs least lift order {}", r.quotient_order, r.min_lift_order)
        })?;
        ensure(r.attained, || "equality flag unset".into())?;
    }
    for c in &f.certs {
        let rb = &c.relative_brauer;
        ensure(rb.index_bound == 3 * rb.min_lift_order, || "bound is not P times the least order".into())?;
        ensure(rb.index_bound as u32 >= c.index.value, || "bound below the index".into())?;
        ensure(rb.quotient_order == rb.min_lift_order && rb.equality_observed, || "attained value missing".into())?;
    }
    Ok(format!("{} classes, quotient order = least lift order on each", classes.len()))
}

fn c10_determinism(f: &mut Fixtures) -> Result<String, String> {
    let p = pair(f)?;
    let fresh = match search_prime_pair(fermat_cubic(), 3, 100_000, 0).map_err(|e| e.to_string())? {
        SearchOutcome::Found(c) => c,
        SearchOutcome::Exhausted(_) => return Err("second search exhausted".into()),
    };
    ensure(serde_json::to_string(&fresh).unwrap() == serde_json::to_string(&p).unwrap(), || "pair differs".into())?;
    let seq = match build_theorem2_sequence(fermat_cubic(), 3, 2, &[2, 3, 5], 300_000, 0).map_err(|e| e.to_string())? {
        SearchOutcome::Found(s) => s,
        SearchOutcome::Exhausted(_) => return Err("second sequence exhausted".into()),
    };
    let mut docs = vec![("sequence_r2.json", serde_json::to_string_pretty(&seq).unwrap())];
    ensure(Some(&seq) == f.seq.as_ref(), || "sequence differs between runs".into())?;
    for (c, name) in f.certs.iter().zip(["theorem1_d3.json", "theorem1_d1.json"]) {
        let again = c.recompute().map_err(|e| e.to_string())?;
        let text = serde_json::to_string_pretty(&again).unwrap();
        ensure(text == serde_json::to_string_pretty(c).unwrap(), || format!("{name} differs between runs"))?;
        docs.push((name, text));
    }
    let freeze = std::env::var_os("FREEZE_FIXTURES").is_some();
    for (name, text) in &docs {
        let path = fixture(name);
        if freeze {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, format!("{text}\n")).unwrap();
            continue;
        }
        let frozen = std::fs::read_to_string(&path).map_err(|e| format!("{name}: {e}"))?;
        ensure(frozen == format!("{text}\n"), || format!("{name} differs from the frozen fixture"))?;
    }
    Ok(format!("{} certificates byte-identical across runs and to fixtures", docs.len()))
}

fn main() {
    let checks: [(&str, Check, Duration); 10] = [
        ("1 hilbert symbol vs conic search", c1_hilbert_vs_conics, Duration::from_secs(60)),
        ("2 tame symbol vs cube enumeration", c2_tame_vs_cubes, Duration::from_secs(30)),
        ("3 global reciprocity", c3_reciprocity, Duration::from_secs(60)),
        ("4 lichtenbaum bilinearity", c4_lichtenbaum, Duration::from_secs(60)),
        ("5 functoriality at levels 3 and 9", c5_functoriality, Duration::from_secs(120)),
        ("6 period 3, index 9 and 3", c6_theorem1, Duration::from_secs(600)),
        ("7 sequence and difference order", c7_theorem2, Duration::from_secs(1800)),
        ("8 splitting plan", c8_theorem3, Duration::from_secs(60)),
        ("9 relative brauer quotient", c9_relative_brauer, Duration::from_secs(60)),
        ("10 determinism", c10_determinism, Duration::from_secs(1800)),
    ];
    let mut fixtures = Fixtures::default();
    let mut failed = 0;
    for (name, check, limit) in checks {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| check(&mut fixtures)))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panic".into())));
        let took = start.elapsed();
        let result = match result {
            Ok(msg) if took > limit => Err(format!("{msg}; took {took:.1?}, limit {limit:?}")),
            r => r,
        };
        match result {
            Ok(msg) => println!("PASS {name}: {msg} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} ({took:.2?})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
