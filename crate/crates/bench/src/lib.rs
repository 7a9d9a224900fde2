//! Criterion benchmarks for `qotto-core`; run with `cargo bench -p qotto-bench`.
