//! Criterion benchmarks for `rfkn-core`; see `benches/`.
