//! Balance conditions whose roots seed the descent.

use super::roots::{safeguarded_newton, RootTolerance};
use crate::error::Result;
use crate::linkmodel::{complete_constellation, error_breakdown, Constellation, SystemParams};

/// Margin kept from the open ends of the `eta2` interval, as a fraction of
/// its width.
const ETA2_EDGE: f64 = 1e-9;
/// Search range for `alpha`. The upper end sits this close to 1 because at
/// high SNR the balance point is within `1e-4` of it.
pub const ALPHA_MIN: f64 = 1e-6;
pub const ALPHA_MAX: f64 = 1.0 - 1e-9;

/// Inner-region error mass minus outer-region error mass as a function of
/// `eta2`, at fixed `eta1` and `alpha`:
/// `(P23 + P32) - (P34 + P4)`.
pub fn eta2_balance(params: &SystemParams, eta1: f64, alpha: f64, eta2: f64) -> Result<f64> {
    let c = complete_constellation(alpha, eta1, eta2)?;
    let t = error_breakdown(params, &c)?.terms;
    Ok((t.p23 + t.p32) - (t.p34 + t.p4))
}

/// Detection-limited error mass minus relay-limited error mass as a
/// function of `alpha`:
/// `P00 (P1 + P4) + P11 (P21 + P23 + P32 + P34) - 2 (P01 + P10)`.
pub fn alpha_balance(params: &SystemParams, eta1: f64, eta2: f64, alpha: f64) -> Result<f64> {
    let c = complete_constellation(alpha, eta1, eta2)?;
    let b = error_breakdown(params, &c)?;
    let (r, t) = (&b.relay, &b.terms);
    Ok(r.p00 * (t.p1 + t.p4) + r.p11 * (t.p21 + t.p23 + t.p32 + t.p34) - 2.0 * (r.p01 + r.p10))
}

/// Open `eta2` interval `(eta1, 0.5(3 + 1/alpha - eta1))` pulled in by a
/// relative margin.
pub fn eta2_search_range(alpha: f64, eta1: f64) -> (f64, f64) {
    let hi = Constellation::eta2_upper_bound(alpha, eta1);
    let w = hi - eta1;
    (eta1 + ETA2_EDGE * w, hi - ETA2_EDGE * w)
}

/// `alpha` range over which `eta2` stays below its upper bound.
pub fn alpha_search_range(eta1: f64, eta2: f64) -> (f64, f64) {
    let slope = 2.0 * eta2 - 3.0 + eta1;
    let hi = if slope > 0.0 {
        ALPHA_MAX.min((1.0 / slope) * (1.0 - 1e-9))
    } else {
        ALPHA_MAX
    };
    (ALPHA_MIN, hi)
}

pub fn find_eta2_star(
    params: &SystemParams,
    eta1: f64,
    alpha: f64,
    tol: RootTolerance,
) -> Result<f64> {
    let (lo, hi) = eta2_search_range(alpha, eta1);
    safeguarded_newton(
        "eta2",
        |x| eta2_balance(params, eta1, alpha, x),
        lo,
        hi,
        tol,
    )
    .map(|r| r.x)
}

pub fn find_alpha_star(
    params: &SystemParams,
    eta1: f64,
    eta2: f64,
    tol: RootTolerance,
) -> Result<f64> {
    let (lo, hi) = alpha_search_range(eta1, eta2);
    safeguarded_newton(
        "alpha",
        |x| alpha_balance(params, eta1, eta2, x),
        lo,
        hi,
        tol,
    )
    .map(|r| r.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: RootTolerance = RootTolerance {
        x_tol: 1e-12,
        f_tol: 0.0,
        max_iter: 200,
    };

    #[test]
    fn eta2_root_balances_regions() {
        let p = SystemParams::new(30.0, 4);
        let e2 = find_eta2_star(&p, 0.0, 0.9, TOL).unwrap();
        let (lo, hi) = eta2_search_range(0.9, 0.0);
        assert!(e2 > lo && e2 < hi);
        let g = eta2_balance(&p, 0.0, 0.9, e2).unwrap();
        assert!(g.abs() < 1e-9, "g = {g}");
        // Sign flips across the root.
        assert!(
            eta2_balance(&p, 0.0, 0.9, e2 - 1e-3).unwrap()
                * eta2_balance(&p, 0.0, 0.9, e2 + 1e-3).unwrap()
                < 0.0
        );
    }

    #[test]
    fn alpha_root_lies_close_to_one_at_high_snr() {
        let p = SystemParams::new(35.0, 2);
        let a = find_alpha_star(&p, 0.0, 1.0, TOL).unwrap();
        assert!(a > 0.99 && a < ALPHA_MAX, "alpha* = {a}");
        let (_, hi) = alpha_search_range(0.0, 1.0);
        assert_eq!(hi, ALPHA_MAX);
    }

    #[test]
    fn alpha_range_respects_eta2_bound() {
        // 2*1.9 - 3 + 0 = 0.8 -> alpha < 1.25, no cut.
        assert_eq!(alpha_search_range(0.0, 1.9).1, ALPHA_MAX);
        // 2*2.5 - 3 = 2 -> alpha < 0.5.
        let (_, hi) = alpha_search_range(0.0, 2.5);
        assert!(hi < 0.5 && hi > 0.5 - 1e-8);
    }
}
