use rand::RngCore;

use super::{check_finite, JumpDiffusionModel, JumpLaw, ModelBounds};
use crate::error::{Error, Result};

/// Parameters of the affine benchmark model
///
/// ```text
/// dX1 = (mu1 - mu2 X1) dt + sqrt(sigma1 + sigma2 X1) dW1
/// dX2 = (mu3 - mu4 X2) dt + sqrt(sigma1 + sigma2 X2) dW2
/// lambda(x) = l1 + l2 x1 + l3 x2
/// ```
///
/// The model has unbounded coefficients. The variance and the intensity are
/// clamped to `[a_floor, inf)` and `[lambda_floor, lambda_cap]` so that the
/// Euler square root stays real and thinning has a finite dominating rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineParams {
    pub mu: [f64; 4],
    pub sigma1: f64,
    pub sigma2: f64,
    pub lambda: [f64; 3],
    pub lambda_floor: f64,
    pub lambda_cap: f64,
    pub a_floor: f64,
    pub jump: JumpLaw,
}

impl Default for AffineParams {
    fn default() -> Self {
        Self {
            mu: [0.6, 0.1, 0.5, 0.2],
            sigma1: 1.0,
            sigma2: 0.2,
            lambda: [0.3, 0.04, 0.04],
            lambda_floor: 1e-6,
            lambda_cap: 5.0,
            a_floor: 1e-8,
            jump: JumpLaw::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AffineModel {
    p: AffineParams,
}

pub fn build_model_affine(params: AffineParams) -> Result<AffineModel> {
    for (i, &m) in params.mu.iter().enumerate() {
        check_finite(["mu1", "mu2", "mu3", "mu4"][i], m)?;
    }
    for (i, &l) in params.lambda.iter().enumerate() {
        check_finite(["lambda1", "lambda2", "lambda3"][i], l)?;
    }
    check_finite("sigma1", params.sigma1)?;
    check_finite("sigma2", params.sigma2)?;
    if params.sigma1 <= 0.0 {
        return Err(Error::invalid("sigma1", params.sigma1, "must be > 0"));
    }
    if params.lambda[0] <= 0.0 {
        return Err(Error::invalid("lambda1", params.lambda[0], "must be > 0"));
    }
    if !(params.a_floor > 0.0 && params.a_floor.is_finite()) {
        return Err(Error::invalid("a_floor", params.a_floor, "must be finite and > 0"));
    }
    if !(params.lambda_floor > 0.0 && params.lambda_floor.is_finite()) {
        return Err(Error::invalid("lambda_floor", params.lambda_floor, "must be finite and > 0"));
    }
    if !(params.lambda_cap.is_finite() && params.lambda_cap >= params.lambda[0]) {
        return Err(Error::invalid(
            "lambda_cap",
            params.lambda_cap,
            format!("must be finite and >= lambda1 = {}", params.lambda[0]),
        ));
    }
    params.jump.validate(2)?;
    Ok(AffineModel { p: params })
}

impl AffineModel {
    pub fn params(&self) -> &AffineParams {
        &self.p
    }

    #[inline]
    fn raw_var(&self, xi: f64) -> f64 {
        self.p.sigma1 + self.p.sigma2 * xi
    }

    #[inline]
    fn var(&self, xi: f64) -> f64 {
        self.raw_var(xi).max(self.p.a_floor)
    }

    #[inline]
    fn raw_intensity(&self, x: &[f64]) -> f64 {
        let [l1, l2, l3] = self.p.lambda;
        l1 + l2 * x[0] + l3 * x[1]
    }

    #[inline]
    fn var_slope(&self, xi: f64) -> f64 {
        if self.raw_var(xi) > self.p.a_floor {
            self.p.sigma2
        } else {
            0.0
        }
    }
}

impl JumpDiffusionModel for AffineModel {
    fn name(&self) -> &str {
        "affine"
    }
    fn dim(&self) -> usize {
        2
    }
    fn brownian_dim(&self) -> usize {
        2
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        let [m1, m2, m3, m4] = self.p.mu;
        out[0] = m1 - m2 * x[0];
        out[1] = m3 - m4 * x[1];
    }

    fn drift_jacobian(&self, _x: &[f64], out: &mut [f64]) {
        out[0] = -self.p.mu[1];
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = -self.p.mu[3];
    }

    fn diffusion(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.var(x[0]).sqrt();
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = self.var(x[1]).sqrt();
    }

    fn covariance(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.var(x[0]);
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = self.var(x[1]);
    }

    fn covariance_grad(&self, x: &[f64], out: &mut [f64]) {
        out[..8].iter_mut().for_each(|o| *o = 0.0);
        out[0] = self.var_slope(x[0]);
        out[7] = self.var_slope(x[1]);
    }

    fn covariance_hess_diag(&self, _x: &[f64], out: &mut [f64]) {
        out[..4].iter_mut().for_each(|o| *o = 0.0);
    }

    fn intensity(&self, x: &[f64]) -> f64 {
        self.raw_intensity(x)
            .clamp(self.p.lambda_floor, self.p.lambda_cap)
    }

    fn intensity_grad(&self, x: &[f64], out: &mut [f64]) {
        let raw = self.raw_intensity(x);
        if raw > self.p.lambda_floor && raw < self.p.lambda_cap {
            out[0] = self.p.lambda[1];
            out[1] = self.p.lambda[2];
        } else {
            out[0] = 0.0;
            out[1] = 0.0;
        }
    }

    fn jump(&self, _x: &[f64], mark: &[f64], out: &mut [f64]) {
        out.copy_from_slice(mark);
    }

    fn sample_mark(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        self.p.jump.sample(rng, out);
    }

    fn bounds(&self) -> ModelBounds {
        ModelBounds {
            lambda_min: self.p.lambda_floor,
            lambda_max: self.p.lambda_cap,
            a_min: self.p.a_floor,
            a_max: f64::INFINITY,
            jump_sup: self.p.jump.sup(),
        }
    }

    fn assumption_violating(&self) -> bool {
        true
    }
}
