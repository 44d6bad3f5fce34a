use rand::RngCore;

use super::{check_finite, JumpDiffusionModel, JumpLaw, ModelBounds};
use crate::error::{Error, Result};

/// Parameters of the bounded trigonometric benchmark model
///
/// ```text
/// dX1 = (mu1 - mu2 sin X1) dt + sqrt(sigma1 + sigma2 sin X1) dW1
/// dX2 = (mu1 - mu2 cos X2) dt + sqrt(sigma1 + sigma2 sin X2) dW2
/// lambda(x) = l1 + l2 sin(l3 x1 + l4 x2)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct TrigParams {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub lambda: [f64; 4],
    pub jump: JumpLaw,
}

impl Default for TrigParams {
    fn default() -> Self {
        Self {
            mu1: 0.4,
            mu2: 0.2,
            sigma1: 1.0,
            sigma2: 0.2,
            lambda: [0.3, 0.2, 0.2, 0.2],
            jump: JumpLaw::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrigModel {
    p: TrigParams,
}

pub fn build_model_trig(params: TrigParams) -> Result<TrigModel> {
    for (name, v) in [
        ("mu1", params.mu1),
        ("mu2", params.mu2),
        ("sigma1", params.sigma1),
        ("sigma2", params.sigma2),
        ("lambda1", params.lambda[0]),
        ("lambda2", params.lambda[1]),
        ("lambda3", params.lambda[2]),
        ("lambda4", params.lambda[3]),
    ] {
        check_finite(name, v)?;
    }
    if params.sigma1 - params.sigma2.abs() <= 0.0 {
        return Err(Error::invalid(
            "sigma1",
            params.sigma1,
            format!("sigma1 - |sigma2| must be > 0 (sigma2 = {})", params.sigma2),
        ));
    }
    if params.lambda[0] - params.lambda[1].abs() <= 0.0 {
        return Err(Error::invalid(
            "lambda1",
            params.lambda[0],
            format!("lambda1 - |lambda2| must be > 0 (lambda2 = {})", params.lambda[1]),
        ));
    }
    params.jump.validate(2)?;
    Ok(TrigModel { p: params })
}

impl TrigModel {
    pub fn params(&self) -> &TrigParams {
        &self.p
    }

    #[inline]
    fn var(&self, xi: f64) -> f64 {
        self.p.sigma1 + self.p.sigma2 * xi.sin()
    }
}

impl JumpDiffusionModel for TrigModel {
    fn name(&self) -> &str {
        "trig"
    }
    fn dim(&self) -> usize {
        2
    }
    fn brownian_dim(&self) -> usize {
        2
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.p.mu1 - self.p.mu2 * x[0].sin();
        out[1] = self.p.mu1 - self.p.mu2 * x[1].cos();
    }

    fn drift_jacobian(&self, x: &[f64], out: &mut [f64]) {
        out[0] = -self.p.mu2 * x[0].cos();
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = self.p.mu2 * x[1].sin();
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
        // d_1 a^{11}, d_2 a^{22}
        out[0] = self.p.sigma2 * x[0].cos();
        out[7] = self.p.sigma2 * x[1].cos();
    }

    fn covariance_hess_diag(&self, x: &[f64], out: &mut [f64]) {
        out[0] = -self.p.sigma2 * x[0].sin();
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = -self.p.sigma2 * x[1].sin();
    }

    fn intensity(&self, x: &[f64]) -> f64 {
        let [l1, l2, l3, l4] = self.p.lambda;
        l1 + l2 * (l3 * x[0] + l4 * x[1]).sin()
    }

    fn intensity_grad(&self, x: &[f64], out: &mut [f64]) {
        let [_, l2, l3, l4] = self.p.lambda;
        let c = l2 * (l3 * x[0] + l4 * x[1]).cos();
        out[0] = c * l3;
        out[1] = c * l4;
    }

    fn jump(&self, _x: &[f64], mark: &[f64], out: &mut [f64]) {
        out.copy_from_slice(mark);
    }

    fn sample_mark(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        self.p.jump.sample(rng, out);
    }

    fn bounds(&self) -> ModelBounds {
        let [l1, l2, _, _] = self.p.lambda;
        ModelBounds {
            lambda_min: l1 - l2.abs(),
            lambda_max: l1 + l2.abs(),
            a_min: self.p.sigma1 - self.p.sigma2.abs(),
            a_max: self.p.sigma1 + self.p.sigma2.abs(),
            jump_sup: self.p.jump.sup(),
        }
    }
}
