//! Benchmark-only crate: see `benches/simulator.rs` for the Criterion
//! benchmarks covering propagation, alignment, calibration repair, the
//! brute-force measurement searches, and an end-to-end sweep. The crate
//! exports nothing; it exists so `cargo bench` has a compile target wired
//! to both the core library and the sweep runner.
