use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_rational::Rational64;
use period_index::construct::search::{search_prime_pair, SearchOutcome};
use period_index::construct::theorem1::{build_theorem1_class, certify_index_theorem1};
use period_index::construct::theorem2::build_theorem2_sequence;
use period_index::descent2::{conic_local_solvable, versal_sample};
use period_index::elliptic::fermat_cubic;
use period_index::obstruction::{delta, kappa0, phi};
use period_index::symbols::{hilbert2_global, symbol_global};
use period_index::{FieldElem, Place};

fn symbols(c: &mut Criterion) {
    let a = FieldElem::parse("2+3w").unwrap().mul(&FieldElem::parse("7").unwrap());
    let b = FieldElem::parse("-1+18w").unwrap();
    c.bench_function("cubic symbol, global", |bch| bch.iter(|| symbol_global(black_box(&a), black_box(&b), 3).unwrap()));
    let (x, y) = (Rational64::new(-35, 3), Rational64::from_integer(22));
    c.bench_function("hilbert symbol, global", |bch| bch.iter(|| hilbert2_global(black_box(&x), black_box(&y)).unwrap()));
    let xi = phi(&a, &b, 3, fermat_cubic()).unwrap();
    c.bench_function("obstruction", |bch| bch.iter(|| delta(black_box(&xi)).unwrap()));
    c.bench_function("relative brauer data", |bch| bch.iter(|| kappa0(black_box(&xi)).unwrap()));
}

fn searches(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("prime pair, bound 1e5", |bch| bch.iter(|| search_prime_pair(fermat_cubic(), 3, 100_000, 0).unwrap()));
    let SearchOutcome::Found(pair) = search_prime_pair(fermat_cubic(), 3, 100_000, 0).unwrap() else {
        panic!("no pair below 1e5");
    };
    g.bench_function("index certificate", |bch| {
        bch.iter(|| certify_index_theorem1(&build_theorem1_class(&pair, 3).unwrap(), &pair, 3).unwrap())
    });
    g.bench_function("sequence r = 2, bound 3e5", |bch| {
        bch.iter(|| build_theorem2_sequence(fermat_cubic(), 3, 2, &[2, 3, 5], 300_000, 0).unwrap())
    });
    g.finish();
}

fn local(c: &mut Criterion) {
    let (a, b) = (Rational64::from_integer(-7), Rational64::from_integer(47));
    c.bench_function("conic at 47", |bch| bch.iter(|| conic_local_solvable(&a, &b, &Place::Rational(47)).unwrap()));
    let places: Vec<Place> = [2, 3, 5, 7].iter().map(|p| Place::Rational(*p)).chain([Place::Real]).collect();
    let mut g = c.benchmark_group("versal");
    g.sample_size(10);
    g.bench_function("sample at 2, 3, 5, 7, inf", |bch| bch.iter(|| versal_sample([1, 1, 1, 0, 0, 0, 0, 3], &places).unwrap()));
    g.finish();
}

criterion_group!(benches, symbols, searches, local);
criterion_main!(benches);
