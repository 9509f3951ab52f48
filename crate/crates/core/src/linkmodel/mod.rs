//! Closed-form link model.
//!
//! Alice (the victim) sends on-off keyed energy; Charlie (the full-duplex
//! helper) energy-detects her bit, folds it into his own 4-level amplitude
//! constellation and forwards on his uplink; Bob (the multi-antenna base
//! station) jointly energy-detects the pair. This module holds every
//! analytic quantity of that chain: the relay detector, the receiver-side
//! variances and thresholds, the per-event error probabilities and the
//! average pair error `P_e` with its upper bound `P_e*`.

mod constellation;
mod params;
mod receiver;
mod relay;

pub use constellation::{complete_constellation, Constellation};
pub use params::{noise_power, SystemParams, ThresholdMode, SIGMA_AB2, SIGMA_CB2};
pub use receiver::{
    bob_thresholds, bob_thresholds_exact, bob_variances, error_breakdown, pe_exact, pe_star,
    BobVariances, ErrorBreakdown, EventProbabilities, TermProbabilities, Thresholds,
};
pub use relay::{charlie_detection, CharlieDetection};

/// `ln(1 + k) / k`, continuous through `k = 0`.
pub(crate) fn log1p_ratio(k: f64) -> f64 {
    if k.abs() < 1e-8 {
        1.0 - k / 2.0 + k * k / 3.0
    } else {
        k.ln_1p() / k
    }
}

/// Energy threshold `n · v_lo v_hi ln(v_hi / v_lo) / (v_hi - v_lo)` that
/// separates `Gamma(n, v_lo)` from `Gamma(n, v_hi)` with equal priors.
///
/// Written as `n · v_hi · ln(1+k)/k` with `k = (v_hi - v_lo)/v_lo` so that
/// nearly equal variances do not cancel.
pub(crate) fn energy_threshold(v_lo: f64, v_hi: f64, n: f64) -> f64 {
    n * v_hi * log1p_ratio((v_hi - v_lo) / v_lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1p_ratio_is_continuous() {
        for k in [1e-7, 1e-8, 1e-9, -1e-9, -1e-8] {
            let series = log1p_ratio(k);
            assert!((series - 1.0).abs() < 1e-7);
        }
        // Both branches agree at the switch point.
        for k in [0.9999e-8, -0.9999e-8] {
            assert!((log1p_ratio(k) - k.ln_1p() / k).abs() < 1e-15);
        }
        assert!((log1p_ratio(1.0) - std::f64::consts::LN_2).abs() < 1e-16);
    }

    #[test]
    fn threshold_between_means() {
        let (lo, hi) = (0.551, 1.251);
        for n in [1.0, 2.0, 32.0] {
            let t = energy_threshold(lo, hi, n);
            assert!(n * lo < t && t < n * hi);
        }
    }
}
