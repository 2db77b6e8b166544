//! Benchmark-only crate; see `benches/core.rs`. The library target exists
//! so the package builds under `cargo build --workspace`.
