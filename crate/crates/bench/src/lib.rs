//! Criterion benchmarks for monoform; see `benches/`.
