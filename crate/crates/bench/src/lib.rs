//! Benchmark-only crate. The measurements live in `benches/benchmarks.rs`;
//! run them with `cargo bench -p isingopt-bench`.
