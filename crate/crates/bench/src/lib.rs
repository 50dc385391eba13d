//! Criterion benchmarks for the pipeline stages over the bundled fixture;
//! run with `cargo bench -p semtex-bench`.
