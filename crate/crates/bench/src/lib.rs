//! Shared inputs for the benchmarks.

use ncf2fd_core::{complete_constellation, Constellation, SystemParams};

/// Operating points used across benches: low, mid and high SNR with a small
/// and a large array.
pub fn operating_points() -> Vec<SystemParams> {
    [(20.0, 2), (30.0, 4), (35.0, 32)]
        .into_iter()
        .map(|(snr, n_r)| SystemParams::new(snr, n_r))
        .collect()
}

pub fn example_constellation() -> Constellation {
    complete_constellation(0.5, 0.1, 1.5).expect("example constellation is feasible")
}
