//! Criterion benchmarks for the symbol layer, the searches and the local solver; see `benches/`.
