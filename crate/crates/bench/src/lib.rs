//! Criterion benchmarks for the pwcis toolkit live in `benches/`.
