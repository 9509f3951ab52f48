use super::{log1p_ratio, SystemParams};
use crate::error::{Error, Result};

/// Charlie's energy detector for Alice's bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharlieDetection {
    /// Mean received energy when Alice sends 0.
    pub n_c0: f64,
    /// Mean received energy when Alice sends 1.
    pub n_c1: f64,
    pub tau: f64,
    /// `Pr(x̂ = 0 | x = 0)`.
    pub p00: f64,
    /// `Pr(x̂ = 1 | x = 0)`.
    pub p01: f64,
    /// `Pr(x̂ = 0 | x = 1)`.
    pub p10: f64,
    /// `Pr(x̂ = 1 | x = 1)`.
    pub p11: f64,
    /// Largest `alpha` for which `p10 < p11`.
    pub nu: f64,
}

/// Detection threshold and error rates at Charlie for power split `alpha`.
pub fn charlie_detection(params: &SystemParams, alpha: f64) -> Result<CharlieDetection> {
    params.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!(
            "alpha must lie in (0, 1) (got {alpha})"
        )));
    }
    let n_o = params.noise_power();
    let residual_si = 0.5 * params.lambda_sic * (1.0 + alpha);
    let n_c0 = n_o + residual_si;
    // N_C1 - N_C0, formed directly so that it is exact as alpha -> 1.
    let gap = params.sigma_ac2 * (1.0 - alpha);
    let n_c1 = n_c0 + gap;
    if !(gap > 0.0) {
        return Err(Error::DegenerateRelay { n_c0, n_c1 });
    }
    let kappa = gap / n_c0;
    let ratio = log1p_ratio(kappa);
    let tau = n_c1 * ratio;
    // tau / N_C0 = (1 + kappa) ln(1 + kappa) / kappa, tau / N_C1 = ln(1 + kappa) / kappa.
    let p01 = (-(1.0 + kappa) * ratio).exp();
    let p10 = -(-ratio).exp_m1();
    let half_lambda = 0.5 * params.lambda_sic;
    let nu = (params.sigma_ac2 - n_o - half_lambda) / (params.sigma_ac2 + half_lambda);
    Ok(CharlieDetection {
        n_c0,
        n_c1,
        tau,
        p00: 1.0 - p01,
        p01,
        p10,
        p11: 1.0 - p10,
        nu,
    })
}
