//! Criterion benchmarks for apfree-core; see `benches/`.
