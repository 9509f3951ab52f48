//! Fast-fading Monte Carlo simulation of the relayed link, band power
//! bookkeeping, and an unprotected jammed on-off keying baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linkmodel::{
    bob_variances, energy_threshold, error_breakdown, Constellation, SystemParams, ThresholdMode,
    Thresholds,
};

/// Trials per independently seeded shard.
const CHUNK: u64 = 1 << 16;
/// Per-symbol f_AB energies closer than this to the plain on-off pattern
/// count as unchanged.
const FLUCTUATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Separates runs that share a seed, e.g. points of one sweep.
    pub stream: u64,
    /// Noise power added on f_AB in the jammed baseline.
    pub jam_power: f64,
    /// Use the exact outer thresholds regardless of the system setting.
    pub exact_thresholds: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            seed: 42,
            stream: 0,
            jam_power: 10.0,
            exact_thresholds: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.trials < 1 {
            problems.push("trials must be >= 1".to_string());
        }
        if !(self.jam_power >= 0.0 && self.jam_power.is_finite()) {
            problems.push(format!("jam_power must be >= 0 (got {})", self.jam_power));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

/// Binomial standard errors for rates, sample standard errors for means.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StandardErrors {
    pub joint_ser: f64,
    pub alice_ber: f64,
    pub charlie_ber: f64,
    pub charlie_relay_ber: f64,
    pub fab_mean_power: f64,
    pub fab_fluctuation_rate: f64,
    pub fcb_mean_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    /// Bob decodes the pair `(x, y)` wrongly.
    pub joint_ser: f64,
    /// Bob decodes Alice's bit wrongly.
    pub alice_ber: f64,
    /// Bob decodes Charlie's bit wrongly.
    pub charlie_ber: f64,
    /// Charlie decodes Alice's bit wrongly.
    pub charlie_relay_ber: f64,
    pub fab_mean_power: f64,
    pub fab_fluctuation_rate: f64,
    pub fcb_mean_power: f64,
    pub trials: u64,
    pub confidence: StandardErrors,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineResult {
    pub alice_ber: f64,
    /// Binomial standard error of `alice_ber`.
    pub alice_ber_se: f64,
    pub threshold: f64,
    pub trials: u64,
}

/// Joint decision from Bob's energy statistic. Energies on a threshold go to
/// the higher region.
pub fn jdd_classify(energy: f64, th: &Thresholds) -> (bool, bool) {
    if energy < th.rho1 {
        (false, false)
    } else if energy < th.rho2 {
        (true, false)
    } else if energy < th.rho3 {
        (true, true)
    } else {
        (false, true)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one shard; depends only on `(seed, stream, chunk)`.
pub(crate) fn shard_rng(seed: u64, stream: u64, chunk: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = splitmix64(seed ^ splitmix64(stream ^ splitmix64(chunk)));
    for word in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        word.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// `|z|²` for `z ~ CN(0, var)`.
fn cn_energy<R: Rng>(rng: &mut R, var: f64) -> f64 {
    let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
    0.5 * var * (re * re + im * im)
}

/// One complex sample of `CN(0, var)`.
fn cn<R: Rng>(rng: &mut R, var: f64) -> (f64, f64) {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    (s * re, s * im)
}

/// Bob's energy statistic summed over `n_r` antennas for one symbol, with
/// fresh fading on every antenna.
pub fn draw_bob_energy<R: Rng>(
    rng: &mut R,
    c: &Constellation,
    n_o: f64,
    n_r: u32,
    x: bool,
    x_hat: bool,
    y: bool,
) -> f64 {
    let alice = if x { (1.0 - c.alpha()).sqrt() } else { 0.0 };
    let charlie = c.level(x_hat, y).sqrt();
    let mut energy = 0.0;
    for _ in 0..n_r {
        let h_ab = cn(rng, 1.0);
        let h_cb = cn(rng, 1.0);
        let n = cn(rng, n_o);
        let re = alice * h_ab.0 + charlie * h_cb.0 + n.0;
        let im = alice * h_ab.1 + charlie * h_cb.1 + n.1;
        energy += re * re + im * im;
    }
    energy
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    joint: u64,
    alice: u64,
    charlie: u64,
    relay: u64,
    fluctuations: u64,
    fab: f64,
    fab_sq: f64,
    fcb: f64,
    fcb_sq: f64,
}

impl Counts {
    fn merge(mut self, o: &Counts) -> Counts {
        self.joint += o.joint;
        self.alice += o.alice;
        self.charlie += o.charlie;
        self.relay += o.relay;
        self.fluctuations += o.fluctuations;
        self.fab += o.fab;
        self.fab_sq += o.fab_sq;
        self.fcb += o.fcb;
        self.fcb_sq += o.fcb_sq;
        self
    }
}

fn chunks(trials: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let n = usize::try_from(trials.div_ceil(CHUNK)).expect("trial count fits in memory");
    (0..n).into_par_iter().map(move |k| {
        let k = k as u64;
        (k, CHUNK.min(trials - k * CHUNK))
    })
}

fn rate(k: u64, n: u64) -> (f64, f64) {
    let p = k as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

fn mean(sum: f64, sum_sq: f64, n: u64) -> (f64, f64) {
    let n_f = n as f64;
    let m = sum / n_f;
    let var = (sum_sq / n_f - m * m).max(0.0);
    (m, (var / n_f).sqrt())
}

/// Simulates `sim.trials` symbol pairs through Charlie's detector, his
/// constellation mapping and Bob's joint energy detector.
///
/// Alice puts energy `alpha` on f_AB and `1 - alpha` on f_CB when her bit
/// is 1. Charlie puts `1 - alpha` on f_AB when he decides 1, and the
/// constellation level on f_CB.
pub fn simulate_ncf2fd(
    params: &SystemParams,
    c: &Constellation,
    sim: &SimConfig,
) -> Result<SimResult> {
    sim.validate()?;
    c.validate()?;
    let mut p = *params;
    if sim.exact_thresholds {
        p.threshold_mode = ThresholdMode::Exact;
    }
    let analysis = error_breakdown(&p, c)?;
    let th = analysis.thresholds;
    let tau = analysis.relay.tau;
    let n_o = p.noise_power();
    let alpha = c.alpha();
    let si_var = 0.5 * p.lambda_sic * (1.0 + alpha);
    let ac_gain = (1.0 - alpha).sqrt();

    let parts: Vec<Counts> = chunks(sim.trials)
        .map(|(k, len)| {
            let mut rng = shard_rng(sim.seed, sim.stream, k);
            let mut t = Counts::default();
            for _ in 0..len {
                let x: bool = rng.random();
                let y: bool = rng.random();

                let h_ac = cn(&mut rng, p.sigma_ac2);
                let si = cn(&mut rng, si_var);
                let n = cn(&mut rng, n_o);
                let (re, im) = if x {
                    (ac_gain * h_ac.0 + si.0 + n.0, ac_gain * h_ac.1 + si.1 + n.1)
                } else {
                    (si.0 + n.0, si.1 + n.1)
                };
                let x_hat = re * re + im * im >= tau;

                let energy = draw_bob_energy(&mut rng, c, n_o, p.n_r, x, x_hat, y);
                let (xb, yb) = jdd_classify(energy, &th);

                t.joint += u64::from(xb != x || yb != y);
                t.alice += u64::from(xb != x);
                t.charlie += u64::from(yb != y);
                t.relay += u64::from(x_hat != x);

                let fab = if x { alpha } else { 0.0 } + if x_hat { 1.0 - alpha } else { 0.0 };
                let plain = if x { 1.0 } else { 0.0 };
                t.fluctuations += u64::from((fab - plain).abs() > FLUCTUATION_TOL);
                t.fab += fab;
                t.fab_sq += fab * fab;
                let fcb = if x { 1.0 - alpha } else { 0.0 } + c.level(x_hat, y);
                t.fcb += fcb;
                t.fcb_sq += fcb * fcb;
            }
            t
        })
        .collect();
    let total = parts.iter().fold(Counts::default(), Counts::merge);

    let n = sim.trials;
    let (joint_ser, joint_se) = rate(total.joint, n);
    let (alice_ber, alice_se) = rate(total.alice, n);
    let (charlie_ber, charlie_se) = rate(total.charlie, n);
    let (relay_ber, relay_se) = rate(total.relay, n);
    let (fluct, fluct_se) = rate(total.fluctuations, n);
    let (fab_mean, fab_se) = mean(total.fab, total.fab_sq, n);
    let (fcb_mean, fcb_se) = mean(total.fcb, total.fcb_sq, n);
    Ok(SimResult {
        joint_ser,
        alice_ber,
        charlie_ber,
        charlie_relay_ber: relay_ber,
        fab_mean_power: fab_mean,
        fab_fluctuation_rate: fluct,
        fcb_mean_power: fcb_mean,
        trials: n,
        confidence: StandardErrors {
            joint_ser: joint_se,
            alice_ber: alice_se,
            charlie_ber: charlie_se,
            charlie_relay_ber: relay_se,
            fab_mean_power: fab_se,
            fab_fluctuation_rate: fluct_se,
            fcb_mean_power: fcb_se,
        },
    })
}

/// On-off keying from Alice straight to Bob on f_AB with the jammer's noise
/// `sim.jam_power` added at every antenna, and no relay.
pub fn simulate_jammed_baseline(params: &SystemParams, sim: &SimConfig) -> Result<BaselineResult> {
    params.validate()?;
    sim.validate()?;
    let noise = params.noise_power() + sim.jam_power;
    let n_r = params.n_r;
    let threshold = energy_threshold(noise, 1.0 + noise, f64::from(n_r));
    let errors: u64 = chunks(sim.trials)
        .map(|(k, len)| {
            let mut rng = shard_rng(sim.seed, sim.stream, k);
            let mut errors = 0;
            for _ in 0..len {
                let x: bool = rng.random();
                let var = if x { 1.0 + noise } else { noise };
                let energy: f64 = (0..n_r).map(|_| cn_energy(&mut rng, var)).sum();
                errors += u64::from((energy >= threshold) != x);
            }
            errors
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    let (alice_ber, alice_ber_se) = rate(errors, sim.trials);
    Ok(BaselineResult {
        alice_ber,
        alice_ber_se,
        threshold,
        trials: sim.trials,
    })
}

/// Variance of Bob's per-antenna signal under hypothesis `(x, x̂, y)`.
pub fn bob_variance(c: &Constellation, n_o: f64, x: bool, x_hat: bool, y: bool) -> f64 {
    bob_variances(c, n_o).for_hypothesis(x, x_hat, y)
}

/// Mean energies on f_AB and f_CB under the simulated power model, with
/// Charlie's decision errors included.
///
/// Both equal their nominal values 0.5 and 1 only when `P01 = P10`. Relay
/// misses shift Charlie towards the `x̂ = 0` levels.
pub fn expected_band_powers(params: &SystemParams, c: &Constellation) -> Result<(f64, f64)> {
    let r = crate::linkmodel::charlie_detection(params, c.alpha())?;
    let alpha = c.alpha();
    let p_hat_one = 0.5 * (r.p01 + r.p11);
    let fab = 0.5 * alpha + (1.0 - alpha) * p_hat_one;
    let charlie = |x_hat: bool| 0.5 * (c.level(x_hat, false) + c.level(x_hat, true));
    let fcb = 0.5 * (1.0 - alpha) + (1.0 - p_hat_one) * charlie(false) + p_hat_one * charlie(true);
    Ok((fab, fcb))
}
