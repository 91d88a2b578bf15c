//! Criterion benchmarks for extraction and the full hull; see `benches/`.
//!
//! `cargo bench -p vqhull-bench`
