use crate::error::{Error, Result};

/// Design knobs of the estimator and the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorParams {
    /// Scale of the auxiliary noise on the `A` coordinate.
    pub sigma_a: f64,
    /// Beta tail exponent; interarrival density is proportional to `t^-gamma`.
    pub gamma: f64,
    /// Extension of the interarrival support beyond the segment length.
    pub epsilon: f64,
    pub horizon: f64,
    /// Grid points closer than this to their predecessor or to the segment end are dropped.
    pub t_min: f64,
}

impl EstimatorParams {
    pub const DEFAULT_T_MIN: f64 = 1e-12;

    pub fn new(sigma_a: f64, gamma: f64, epsilon: f64, horizon: f64) -> Result<Self> {
        let p = Self {
            sigma_a,
            gamma,
            epsilon,
            horizon,
            t_min: Self::DEFAULT_T_MIN,
        };
        p.validate()?;
        if !p.finite_variance_regime() {
            log::warn!("gamma = {gamma} is outside (0, 1/2); the estimator variance may be infinite");
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_a > 0.0 && self.sigma_a.is_finite()) {
            return Err(Error::invalid("sigma_a", self.sigma_a, "must be finite and > 0"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid("gamma", self.gamma, "must lie in (0, 1)"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", self.epsilon, "must be finite and > 0"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid("horizon", self.horizon, "must be finite and > 0"));
        }
        if !(self.t_min >= 0.0 && self.t_min.is_finite()) {
            return Err(Error::invalid("t_min", self.t_min, "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn finite_variance_regime(&self) -> bool {
        self.gamma > 0.0 && self.gamma < 0.5
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            sigma_a: 0.5,
            gamma: 0.25,
            epsilon: 1.0,
            horizon: 1.0,
            t_min: Self::DEFAULT_T_MIN,
        }
    }
}
