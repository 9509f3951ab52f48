use ncf2fd_core::linkmodel::{bob_variances, charlie_detection};
use ncf2fd_core::simulator::draw_bob_energy;
use ncf2fd_core::specfun::{reg_lower_gamma, reg_upper_gamma};
use ncf2fd_core::{
    complete_constellation, error_breakdown, expected_band_powers, simulate_ncf2fd, Constellation,
    SimConfig, SystemParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Kolmogorov survival function `Pr(K > t)`.
fn kolmogorov_sf(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let k = f64::from(k);
            let sign = if k as u32 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * t * t).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

fn ks_p_value(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let d = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sq = n.sqrt();
    kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)
}

#[test]
fn kolmogorov_tail_values() {
    // Critical values of the limiting distribution.
    assert!((kolmogorov_sf(1.358) - 0.05).abs() < 5e-4);
    assert!((kolmogorov_sf(1.628) - 0.01).abs() < 5e-4);
}

#[test]
fn bob_energy_is_gamma_under_every_hypothesis() {
    let p = SystemParams::new(30.0, 4);
    let c = complete_constellation(0.5, 0.1, 1.5).unwrap();
    let n_o = p.noise_power();
    let v = bob_variances(&c, n_o);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for x in [false, true] {
        for x_hat in [false, true] {
            for y in [false, true] {
                let var = v.for_hypothesis(x, x_hat, y);
                let samples: Vec<f64> = (0..100_000)
                    .map(|_| draw_bob_energy(&mut rng, &c, n_o, p.n_r, x, x_hat, y))
                    .collect();
                let pv = ks_p_value(samples, |e| reg_lower_gamma(4.0, e / var).unwrap());
                assert!(pv > 0.01, "({x}, {x_hat}, {y}): p = {pv}");
            }
        }
    }
}

/// Pair error rate with every relay outcome and every decision region
/// accounted for, not only the adjacent events.
fn enumerated_ser(p: &SystemParams, c: &Constellation) -> f64 {
    let b = error_breakdown(p, c).unwrap();
    let th = b.thresholds;
    let n = f64::from(p.n_r);
    let r = b.relay;
    let mut total = 0.0;
    for x in [false, true] {
        for y in [false, true] {
            // Region of the correct decision.
            let (lo, hi) = match (x, y) {
                (false, false) => (0.0, th.rho1),
                (true, false) => (th.rho1, th.rho2),
                (true, true) => (th.rho2, th.rho3),
                (false, true) => (th.rho3, f64::INFINITY),
            };
            for x_hat in [false, true] {
                let prior = match (x, x_hat) {
                    (false, false) => r.p00,
                    (false, true) => r.p01,
                    (true, false) => r.p10,
                    (true, true) => r.p11,
                };
                let var = b.variances.for_hypothesis(x, x_hat, y);
                let below = reg_lower_gamma(n, lo / var).unwrap();
                let above = if hi.is_finite() {
                    reg_upper_gamma(n, hi / var).unwrap()
                } else {
                    0.0
                };
                total += 0.25 * prior * (below + above);
            }
        }
    }
    total
}

#[test]
fn running_example_matches_closed_form() {
    let p = SystemParams::new(30.0, 2);
    let c = complete_constellation(0.5, 0.1, 1.5).unwrap();
    let b = error_breakdown(&p, &c).unwrap();
    let exact = enumerated_ser(&p, &c);
    // The six adjacent events cover all but a sliver of the error mass.
    assert!(
        exact >= b.pe && exact - b.pe < 1e-3 * b.pe,
        "{exact} vs {}",
        b.pe
    );

    let r = simulate_ncf2fd(
        &p,
        &c,
        &SimConfig {
            trials: 1_000_000,
            ..SimConfig::default()
        },
    )
    .unwrap();
    let sd = r.confidence.joint_ser;
    assert!(
        (r.joint_ser - b.pe).abs() < 3.0 * sd,
        "sim {} pe {} sd {sd}",
        r.joint_ser,
        b.pe
    );
    assert!(r.joint_ser <= b.pe_star + 3.0 * sd);

    let relay = 0.5 * (b.relay.p01 + b.relay.p10);
    assert!((r.charlie_relay_ber - relay).abs() < 3.0 * r.confidence.charlie_relay_ber);
    assert_eq!(r.fab_fluctuation_rate, r.charlie_relay_ber);
    assert!((r.fab_mean_power - 0.5).abs() < 3.0 * r.confidence.fab_mean_power);
    assert!((r.fcb_mean_power - 1.0).abs() < 3.0 * r.confidence.fcb_mean_power);
}

#[test]
fn exact_thresholds_track_their_own_closed_form() {
    let p = SystemParams::new(30.0, 4).with_threshold_mode(ncf2fd_core::ThresholdMode::Exact);
    let c = complete_constellation(0.9, 0.0, 0.6).unwrap();
    let b = error_breakdown(&p, &c).unwrap();
    let sim = SimConfig {
        trials: 500_000,
        exact_thresholds: true,
        ..SimConfig::default()
    };
    let r = simulate_ncf2fd(&SystemParams::new(30.0, 4), &c, &sim).unwrap();
    assert!((r.joint_ser - b.pe).abs() < 3.0 * r.confidence.joint_ser);
}

#[test]
fn perfect_relay_limit() {
    let p = SystemParams::new(30.0, 4)
        .with_lambda_sic(1e-12)
        .with_sigma_ac2(1e8);
    let c = complete_constellation(0.5, 0.1, 1.5).unwrap();
    let d = charlie_detection(&p, 0.5).unwrap();
    assert!(d.p01 < 1e-6 && d.p10 < 1e-6);
    let t = error_breakdown(&p, &c).unwrap().terms;
    let ideal = 0.25 * (t.p1 + t.p4 + t.p21 + t.p23 + t.p32 + t.p34);
    let r = simulate_ncf2fd(
        &p,
        &c,
        &SimConfig {
            trials: 400_000,
            ..SimConfig::default()
        },
    )
    .unwrap();
    assert!(r.charlie_relay_ber < 1e-5);
    assert!((r.joint_ser - ideal).abs() < 3.0 * r.confidence.joint_ser);
}

#[test]
fn band_powers_follow_relay_imbalance() {
    // Near alpha = 1 the relay misses far more ones than it invents, so
    // Charlie spends more time on the high x̂ = 0 level.
    let p = SystemParams::new(30.0, 4);
    let c = complete_constellation(0.97, 0.0, 0.29).unwrap();
    let (fab, fcb) = expected_band_powers(&p, &c).unwrap();
    assert!(fcb > 1.01);
    let r = simulate_ncf2fd(
        &p,
        &c,
        &SimConfig {
            trials: 400_000,
            ..SimConfig::default()
        },
    )
    .unwrap();
    assert!((r.fab_mean_power - fab).abs() < 3.0 * r.confidence.fab_mean_power);
    assert!((r.fcb_mean_power - fcb).abs() < 3.0 * r.confidence.fcb_mean_power);
}
