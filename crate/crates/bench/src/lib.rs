//! Fixed workloads shared by the benchmarks.

use anyon_entropy::{StatisticsParameter, TruncationConfig, TwoAnyonState};

/// η values spanning the near-bosonic, crossover and near-fermionic regimes.
pub const ETAS: [f64; 3] = [0.25, 1.0, 25.0];

pub fn state(j: usize, i: usize, eta: f64) -> TwoAnyonState {
    TwoAnyonState::new(j, i, StatisticsParameter::new(eta).expect("benchmark η is valid"))
}

/// Default truncation with a smaller basis, for the per-matrix benches.
pub fn small_config() -> TruncationConfig {
    TruncationConfig::new(16, 24, 40).expect("valid truncation")
}
