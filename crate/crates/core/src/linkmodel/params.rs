use crate::error::{Error, Result};

/// Alice-to-Bob channel variance.
pub const SIGMA_AB2: f64 = 1.0;
/// Charlie-to-Bob channel variance.
pub const SIGMA_CB2: f64 = 1.0;

/// `N_o = 10^(-snr_db / 10)`, the per-antenna noise power for unit signal power.
pub fn noise_power(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Which form of the outer receiver thresholds to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMode {
    /// Drop the `ln(P11/P00)` prior term from `rho1` and `rho3`.
    #[default]
    Approximate,
    /// Keep the prior term (sensitivity checks).
    Exact,
}

/// Radio and channel configuration shared by the analysis, the optimizer
/// and the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub snr_db: f64,
    /// Receive antennas at Bob.
    pub n_r: u32,
    /// Residual self-interference factor of Charlie's full-duplex radio.
    pub lambda_sic: f64,
    /// Alice-to-Charlie channel variance; must exceed [`SIGMA_CB2`].
    pub sigma_ac2: f64,
    pub threshold_mode: ThresholdMode,
}

impl SystemParams {
    pub const DEFAULT_LAMBDA_SIC: f64 = 1e-5;
    pub const DEFAULT_SIGMA_AC2: f64 = 10.0;

    pub fn new(snr_db: f64, n_r: u32) -> Self {
        Self {
            snr_db,
            n_r,
            lambda_sic: Self::DEFAULT_LAMBDA_SIC,
            sigma_ac2: Self::DEFAULT_SIGMA_AC2,
            threshold_mode: ThresholdMode::Approximate,
        }
    }

    pub fn with_lambda_sic(mut self, lambda_sic: f64) -> Self {
        self.lambda_sic = lambda_sic;
        self
    }

    pub fn with_sigma_ac2(mut self, sigma_ac2: f64) -> Self {
        self.sigma_ac2 = sigma_ac2;
        self
    }

    pub fn with_threshold_mode(mut self, mode: ThresholdMode) -> Self {
        self.threshold_mode = mode;
        self
    }

    pub fn noise_power(&self) -> f64 {
        noise_power(self.snr_db)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !self.snr_db.is_finite() {
            problems.push(format!("snr_db must be finite (got {})", self.snr_db));
        }
        if self.n_r < 1 {
            problems.push("n_r must be >= 1".to_string());
        }
        if !(self.lambda_sic.is_finite() && self.lambda_sic > 0.0) {
            problems.push(format!("lambda_sic must be > 0 (got {})", self.lambda_sic));
        }
        if !(self.sigma_ac2.is_finite() && self.sigma_ac2 > SIGMA_CB2) {
            problems.push(format!(
                "sigma_ac2 must exceed sigma_cb2 = {SIGMA_CB2} (got {})",
                self.sigma_ac2
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems.join("; ")))
        }
    }
}
