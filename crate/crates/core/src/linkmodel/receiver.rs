use super::{
    charlie_detection, energy_threshold, CharlieDetection, Constellation, SystemParams,
    ThresholdMode,
};
use crate::error::{Error, Result};
use crate::specfun::{reg_lower_gamma, reg_upper_gamma};

/// Per-antenna variances of Bob's received symbol for each `(x, x̂, y)`.
///
/// The four dominant hypotheses (relay decoded correctly) are `v00`, `v10`,
/// `v11`, `v01`; the `*_bar_*` fields are the non-dominant counterparts in
/// which Charlie mis-decoded Alice's bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobVariances {
    pub v00: f64,
    pub v10: f64,
    pub v11: f64,
    pub v01: f64,
    pub v0bar0: f64,
    pub v0bar1: f64,
    pub v1bar0: f64,
    pub v1bar1: f64,
}

impl BobVariances {
    /// Variance seen by Bob when Alice sent `x`, Charlie decided `x_hat` and
    /// Charlie's own bit is `y`.
    pub fn for_hypothesis(&self, x: bool, x_hat: bool, y: bool) -> f64 {
        match (x, x_hat, y) {
            (false, false, false) => self.v00,
            (false, false, true) => self.v01,
            (false, true, false) => self.v0bar0,
            (false, true, true) => self.v0bar1,
            (true, false, false) => self.v1bar0,
            (true, false, true) => self.v1bar1,
            (true, true, false) => self.v10,
            (true, true, true) => self.v11,
        }
    }
}

pub fn bob_variances(c: &Constellation, n_o: f64) -> BobVariances {
    let a = c.alpha();
    let alice = 1.0 - a;
    BobVariances {
        v00: c.eps1() + n_o,
        v10: alice + a * c.eta1() + n_o,
        v11: alice + a * c.eta2() + n_o,
        v01: c.eps2() + n_o,
        v0bar0: a * c.eta1() + n_o,
        v0bar1: a * c.eta2() + n_o,
        v1bar0: alice + c.eps1() + n_o,
        v1bar1: alice + c.eps2() + n_o,
    }
}

/// Bob's three energy thresholds, increasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
}

fn ordered_pair(lo: f64, hi: f64) -> Result<()> {
    if lo > 0.0 && hi > lo {
        Ok(())
    } else {
        Err(Error::SingularThreshold {
            lower: lo,
            upper: hi,
        })
    }
}

/// Thresholds between adjacent dominant hypotheses, without the prior term.
pub fn bob_thresholds(v: &BobVariances, n_r: u32) -> Result<Thresholds> {
    ordered_pair(v.v00, v.v10)?;
    ordered_pair(v.v10, v.v11)?;
    ordered_pair(v.v11, v.v01)?;
    let n = f64::from(n_r);
    Ok(Thresholds {
        rho1: energy_threshold(v.v00, v.v10, n),
        rho2: energy_threshold(v.v10, v.v11, n),
        rho3: energy_threshold(v.v11, v.v01, n),
    })
}

/// Thresholds keeping the `ln(P11/P00)` prior term in `rho1` and `rho3`.
pub fn bob_thresholds_exact(
    v: &BobVariances,
    n_r: u32,
    relay: &CharlieDetection,
) -> Result<Thresholds> {
    let approx = bob_thresholds(v, n_r)?;
    let log_prior = (relay.p11 / relay.p00).ln();
    let rho1 = approx.rho1 - v.v00 * v.v10 / (v.v10 - v.v00) * log_prior;
    let rho3 = approx.rho3 + v.v11 * v.v01 / (v.v01 - v.v11) * log_prior;
    if !(rho1 > 0.0 && rho1 < approx.rho2 && approx.rho2 < rho3) {
        return Err(Error::SingularThreshold {
            lower: rho1,
            upper: rho3,
        });
    }
    Ok(Thresholds {
        rho1,
        rho2: approx.rho2,
        rho3,
    })
}

/// Regularized-gamma terms of the six adjacent error events.
///
/// `P1`, `P23`, `P34`, `P1C` and `P34C` are upper-tail probabilities (energy
/// above the threshold); `P21`, `P32`, `P4`, `P21C` and `P4C` are lower-tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermProbabilities {
    pub p1: f64,
    pub p1c: f64,
    pub p21: f64,
    pub p21c: f64,
    pub p23: f64,
    pub p32: f64,
    pub p34: f64,
    pub p34c: f64,
    pub p4: f64,
    pub p4c: f64,
}

/// Probabilities of the six adjacent pair-error events, relay errors mixed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventProbabilities {
    /// `(00) -> (10)`
    pub e00_to_10: f64,
    /// `(10) -> (00)`
    pub e10_to_00: f64,
    /// `(10) -> (11)`
    pub e10_to_11: f64,
    /// `(11) -> (10)`
    pub e11_to_10: f64,
    /// `(11) -> (01)`
    pub e11_to_01: f64,
    /// `(01) -> (11)`
    pub e01_to_11: f64,
}

impl EventProbabilities {
    pub fn sum(&self) -> f64 {
        self.e00_to_10
            + self.e10_to_00
            + self.e10_to_11
            + self.e11_to_10
            + self.e11_to_01
            + self.e01_to_11
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBreakdown {
    pub relay: CharlieDetection,
    pub variances: BobVariances,
    pub thresholds: Thresholds,
    pub terms: TermProbabilities,
    pub events: EventProbabilities,
    /// Average pair error probability.
    pub pe: f64,
    /// Upper bound on `pe` with every complement term set to one.
    pub pe_star: f64,
}

fn clamp_probability(name: &'static str, value: f64) -> Result<f64> {
    const SLACK: f64 = 1e-9;
    if !(-SLACK..=1.0 + SLACK).contains(&value) {
        return Err(Error::Probability { name, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Full closed-form error analysis of one operating point.
pub fn error_breakdown(params: &SystemParams, c: &Constellation) -> Result<ErrorBreakdown> {
    let relay = charlie_detection(params, c.alpha())?;
    let v = bob_variances(c, params.noise_power());
    let th = match params.threshold_mode {
        ThresholdMode::Approximate => bob_thresholds(&v, params.n_r)?,
        ThresholdMode::Exact => bob_thresholds_exact(&v, params.n_r, &relay)?,
    };
    let n = f64::from(params.n_r);
    let upper = |rho: f64, var: f64| reg_upper_gamma(n, rho / var);
    let lower = |rho: f64, var: f64| reg_lower_gamma(n, rho / var);

    let terms = TermProbabilities {
        p1: upper(th.rho1, v.v00)?,
        p1c: upper(th.rho1, v.v0bar0)?,
        p21: lower(th.rho1, v.v10)?,
        p21c: lower(th.rho1, v.v1bar0)?,
        p23: upper(th.rho2, v.v10)?,
        p32: lower(th.rho2, v.v11)?,
        p34: upper(th.rho3, v.v11)?,
        p34c: upper(th.rho3, v.v1bar1)?,
        p4: lower(th.rho3, v.v01)?,
        p4c: lower(th.rho3, v.v0bar1)?,
    };
    let t = &terms;
    let r = &relay;
    let events = EventProbabilities {
        e00_to_10: clamp_probability("Pr((00)->(10))", r.p00 * t.p1 + r.p01 * t.p1c)?,
        e10_to_00: clamp_probability("Pr((10)->(00))", r.p11 * t.p21 + r.p10 * t.p21c)?,
        e10_to_11: clamp_probability("Pr((10)->(11))", r.p11 * t.p23)?,
        e11_to_10: clamp_probability("Pr((11)->(10))", r.p11 * t.p32)?,
        e11_to_01: clamp_probability("Pr((11)->(01))", r.p11 * t.p34 + r.p10 * t.p34c)?,
        e01_to_11: clamp_probability("Pr((01)->(11))", r.p00 * t.p4 + r.p01 * t.p4c)?,
    };
    let pe = clamp_probability("P_e", 0.25 * events.sum())?;
    let pe_star = clamp_probability("P_e*", pe_star_from(r, t))?;
    Ok(ErrorBreakdown {
        relay,
        variances: v,
        thresholds: th,
        terms,
        events,
        pe,
        pe_star,
    })
}

pub(crate) fn pe_star_from(r: &CharlieDetection, t: &TermProbabilities) -> f64 {
    0.25 * (r.p00 * (t.p1 + t.p4)
        + 2.0 * r.p01
        + 2.0 * r.p10
        + r.p11 * (t.p21 + t.p23 + t.p32 + t.p34))
}

pub fn pe_exact(params: &SystemParams, c: &Constellation) -> Result<f64> {
    error_breakdown(params, c).map(|b| b.pe)
}

pub fn pe_star(params: &SystemParams, c: &Constellation) -> Result<f64> {
    error_breakdown(params, c).map(|b| b.pe_star)
}

// Reference values are kept at the precision they were computed to.
#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::linkmodel::complete_constellation;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn running() -> (SystemParams, Constellation) {
        (
            SystemParams::new(30.0, 2),
            complete_constellation(0.5, 0.1, 1.5).unwrap(),
        )
    }

    #[test]
    fn variances_by_hand() {
        let (_, c) = running();
        let v = bob_variances(&c, 1e-3);
        let dominant = [v.v00, v.v10, v.v11, v.v01];
        let expect = [0.001, 0.551, 1.251, 2.201];
        for (got, want) in dominant.iter().zip(expect) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        let other = [v.v0bar0, v.v0bar1, v.v1bar0, v.v1bar1];
        let expect = [0.051, 0.751, 0.501, 2.701];
        for (got, want) in other.iter().zip(expect) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn alpha_to_one_collapses_alice_term() {
        let c = complete_constellation(1.0 - 1e-12, 0.0, 1.0).unwrap();
        let v = bob_variances(&c, 1e-3);
        assert!((v.v00 - 1e-3).abs() < 1e-11);
        assert!((v.v1bar0 - 1e-3).abs() < 1e-11);
    }

    // 50-digit reference values.
    #[test]
    fn thresholds_running_example() {
        let (_, c) = running();
        let th = bob_thresholds(&bob_variances(&c, 1e-3), 2).unwrap();
        assert!(rel(th.rho1, 0.012646421381248203) < 1e-13);
        assert!(rel(th.rho2, 1.6148622836555406) < 1e-13);
        assert!(rel(th.rho3, 3.2749753198999799) < 1e-13);
    }

    #[test]
    fn exact_thresholds_running_example() {
        let (p, c) = running();
        let relay = charlie_detection(&p, 0.5).unwrap();
        let th = bob_thresholds_exact(&bob_variances(&c, 1e-3), 2, &relay).unwrap();
        assert!(rel(th.rho1, 0.012647937748214879506) < 1e-11);
        assert!(rel(th.rho3, 3.2705883045643814805) < 1e-11);
    }

    #[test]
    fn singular_thresholds_rejected() {
        let mut v = bob_variances(&running().1, 1e-3);
        v.v11 = v.v10;
        assert!(matches!(
            bob_thresholds(&v, 2),
            Err(Error::SingularThreshold { .. })
        ));
    }

    #[test]
    fn table_terms_running_example() {
        let (p, c) = running();
        let b = error_breakdown(&p, &c).unwrap();
        let t = b.terms;
        let expect = [
            (t.p1, 0.00004392863977758638849),
            (t.p1c, 0.9738951993009982605),
            (t.p21, 0.00025939598464249750962),
            (t.p21c, 0.00031327744901758967482),
            (t.p23, 0.20972764713291111808),
            (t.p32, 0.36993424763223492941),
            (t.p34, 0.26394986889640691298),
            (t.p34c, 0.65811242524858100271),
            (t.p4, 0.43813305350613403468),
            (t.p4c, 0.93155347598086064812),
        ];
        for (i, (got, want)) in expect.iter().enumerate() {
            assert!(rel(*got, *want) < 1e-10, "term {i}: {got} vs {want}");
        }
        assert!(rel(b.pe_star, 0.32108575478990177837) < 1e-12);
        assert!(rel(b.pe, 0.32050637775790903308) < 1e-12);
        let ev = b.events;
        let r = b.relay;
        assert!((ev.e00_to_10 - (r.p00 * t.p1 + r.p01 * t.p1c)).abs() < 1e-16);
    }

    #[test]
    fn bound_gap_identity() {
        let (p, c) = running();
        let b = error_breakdown(&p, &c).unwrap();
        let (r, t) = (b.relay, b.terms);
        let gap = 0.25 * (r.p01 * (2.0 - t.p1c - t.p4c) + r.p10 * (2.0 - t.p21c - t.p34c));
        assert!((b.pe_star - b.pe - gap).abs() < 1e-15);
        // Saturated complements reproduce the bound.
        let saturated = TermProbabilities {
            p1c: 1.0,
            p4c: 1.0,
            p21c: 1.0,
            p34c: 1.0,
            ..t
        };
        let pe_sat = 0.25
            * (r.p00 * saturated.p1
                + r.p01
                + r.p11 * (saturated.p21 + saturated.p23 + saturated.p32 + saturated.p34)
                + r.p10
                + r.p10
                + r.p00 * saturated.p4
                + r.p01);
        assert!((pe_sat - pe_star_from(&r, &saturated)).abs() < 1e-16);
    }

    #[test]
    fn perfect_relay_bound() {
        let r = CharlieDetection {
            n_c0: 1.0,
            n_c1: 2.0,
            tau: 1.0,
            p00: 1.0,
            p01: 0.0,
            p10: 0.0,
            p11: 1.0,
            nu: 0.5,
        };
        let b = error_breakdown(&running().0, &running().1).unwrap();
        let t = b.terms;
        let want = 0.25 * ((t.p1 + t.p4) + (t.p21 + t.p23 + t.p32 + t.p34));
        assert_eq!(pe_star_from(&r, &t), want);
    }

    #[test]
    fn p23_tends_to_gamma_at_shape() {
        // kappa2 -> 0 puts rho2 / v10 at N_r.
        let p = SystemParams::new(30.0, 4);
        let c = complete_constellation(0.5, 0.1, 0.1 + 1e-10).unwrap();
        let b = error_breakdown(&p, &c).unwrap();
        let q = reg_upper_gamma(4.0, 4.0).unwrap();
        assert!((b.terms.p23 - q).abs() < 1e-8);
        assert!((b.terms.p23 + b.terms.p32 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn exact_mode_runs() {
        let (p, c) = running();
        let p = p.with_threshold_mode(ThresholdMode::Exact);
        let b = error_breakdown(&p, &c).unwrap();
        assert!(b.pe <= b.pe_star);
    }
}
