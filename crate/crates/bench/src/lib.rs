//! Benchmarks live under `benches/`; run them with `cargo bench -p unital-bench`.
