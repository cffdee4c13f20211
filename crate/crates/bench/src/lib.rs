//! Criterion benchmarks for the inner solvers; see `benches/solvers.rs`.
