//! Criterion benchmarks for the brandt pipeline; see `benches/pipeline.rs`.
