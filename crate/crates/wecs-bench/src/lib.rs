//! Criterion benchmarks for the simulation core live in `benches/`; this
//! crate intentionally exports nothing.
