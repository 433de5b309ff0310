//! Shared fixtures for the duality benchmarks.

use duality_core::{sample_mixed, QuantonState};

/// A deterministic full-rank mixed state per path count.
pub fn fixture_state(n: usize) -> QuantonState {
    sample_mixed(n, n, 0xBE7C + n as u64).expect("valid benchmark fixture")
}
