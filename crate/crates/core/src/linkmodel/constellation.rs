use crate::error::{Error, Result};

const POWER_TOLERANCE: f64 = 1e-12;

/// Charlie's modified constellation together with the power split.
///
/// Charlie transmits energy `eps1`, `alpha·eta1`, `alpha·eta2` or `eps2`
/// for `(x̂, y)` equal to `(0,0)`, `(1,0)`, `(1,1)`, `(0,1)` respectively.
/// Instances are only created through [`Constellation::new`] or
/// [`complete_constellation`], both of which enforce the ordering, the
/// power constraint and the design-variable domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constellation {
    eps1: f64,
    eps2: f64,
    eta1: f64,
    eta2: f64,
    alpha: f64,
}

impl Constellation {
    pub fn new(eps1: f64, eps2: f64, eta1: f64, eta2: f64, alpha: f64) -> Result<Self> {
        let c = Self {
            eps1,
            eps2,
            eta1,
            eta2,
            alpha,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }
    pub fn eps2(&self) -> f64 {
        self.eps2
    }
    pub fn eta1(&self) -> f64 {
        self.eta1
    }
    pub fn eta2(&self) -> f64 {
        self.eta2
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Charlie's transmit energy for relay decision `x_hat` and own bit `y`.
    pub fn level(&self, x_hat: bool, y: bool) -> f64 {
        match (x_hat, y) {
            (false, false) => self.eps1,
            (true, false) => self.alpha * self.eta1,
            (true, true) => self.alpha * self.eta2,
            (false, true) => self.eps2,
        }
    }

    /// Average energy over the four points.
    pub fn mean_energy(&self) -> f64 {
        0.25 * (self.eps1 + self.alpha * self.eta1 + self.alpha * self.eta2 + self.eps2)
    }

    /// Upper end of the open `eta2` interval for given `alpha` and `eta1`,
    /// where the (1,1) and (0,1) received variances meet.
    pub fn eta2_upper_bound(alpha: f64, eta1: f64) -> f64 {
        0.5 * (3.0 + 1.0 / alpha - eta1)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            eps1,
            eps2,
            eta1,
            eta2,
            alpha,
        } = *self;
        if ![eps1, eps2, eta1, eta2, alpha]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::Ordering("non-finite design variable".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Ordering(format!("alpha = {alpha} outside (0, 1)")));
        }
        if !(0.0..1.0).contains(&eta1) {
            return Err(Error::Ordering(format!("eta1 = {eta1} outside [0, 1)")));
        }
        if eps1 < 0.0 {
            return Err(Error::Ordering(format!("eps1 = {eps1} is negative")));
        }
        // eps1 may only touch alpha*eta1 at the common origin eps1 = eta1 = 0.
        let low_ok = eps1 < alpha * eta1 || (eps1 == 0.0 && eta1 == 0.0);
        if !low_ok {
            return Err(Error::Ordering(format!(
                "eps1 = {eps1} must be below alpha*eta1 = {}",
                alpha * eta1
            )));
        }
        if !(eta2 > eta1) {
            return Err(Error::Ordering(format!(
                "eta2 = {eta2} must exceed eta1 = {eta1}"
            )));
        }
        let upper = Self::eta2_upper_bound(alpha, eta1);
        if !(eta2 < upper) {
            return Err(Error::Ordering(format!(
                "eta2 = {eta2} must be below 0.5(3 + 1/alpha - eta1) = {upper}"
            )));
        }
        // (1,1) must stay below (0,1) at Bob: 1 - alpha + alpha*eta2 < eps2.
        if !(1.0 - alpha + alpha * eta2 < eps2) {
            return Err(Error::Ordering(format!(
                "eps2 = {eps2} must exceed 1 - alpha + alpha*eta2 = {}",
                1.0 - alpha + alpha * eta2
            )));
        }
        let mean = self.mean_energy();
        let target = 0.5 * (1.0 + alpha);
        if (mean - target).abs() > POWER_TOLERANCE {
            return Err(Error::PowerConstraint { mean, target });
        }
        Ok(())
    }
}

/// Builds the constellation with `eps1 = 0` and `eps2` fixed by the power
/// constraint, `eps2 = 2 - alpha (eta1 + eta2 - 2)`.
pub fn complete_constellation(alpha: f64, eta1: f64, eta2: f64) -> Result<Constellation> {
    let eps2 = 2.0 - alpha * (eta1 + eta2 - 2.0);
    Constellation::new(0.0, eps2, eta1, eta2, alpha)
}
