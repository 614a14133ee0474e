//! Shared input builders for the benchmark suite live in benches/.
