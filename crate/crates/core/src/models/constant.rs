use rand::RngCore;

use super::{check_finite, JumpDiffusionModel, JumpLaw, ModelBounds};
use crate::error::{Error, Result};
use crate::linalg;

/// Constant-coefficient jump-diffusion in any dimension: drift `b`, diffusion
/// matrix `s` (`d x m`, row-major), constant intensity and a state-free jump law.
///
/// Used as the `custom` model and as the closed-form oracle model
/// (`X_T = x0 + b T + s W_T + sum of jumps`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantParams {
    pub drift: Vec<f64>,
    pub diffusion: Vec<f64>,
    pub brownian_dim: usize,
    pub intensity: f64,
    pub jump: JumpLaw,
}

impl ConstantParams {
    /// One-dimensional model `dX = b dt + s dW` plus jumps at rate `intensity`.
    pub fn scalar(b: f64, s: f64, intensity: f64, jump: JumpLaw) -> Self {
        Self {
            drift: vec![b],
            diffusion: vec![s],
            brownian_dim: 1,
            intensity,
            jump,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstantModel {
    p: ConstantParams,
    cov: Vec<f64>,
    eig: (f64, f64),
}

impl ConstantModel {
    pub fn new(params: ConstantParams) -> Result<Self> {
        let d = params.drift.len();
        let m = params.brownian_dim;
        if d == 0 {
            return Err(Error::invalid("dimension", 0.0, "must be >= 1"));
        }
        if m == 0 || params.diffusion.len() != d * m {
            return Err(Error::invalid(
                "diffusion",
                params.diffusion.len() as f64,
                format!("expected {d} x {m} entries"),
            ));
        }
        for &v in params.drift.iter().chain(&params.diffusion) {
            check_finite("coefficient", v)?;
        }
        if !(params.intensity >= 0.0 && params.intensity.is_finite()) {
            return Err(Error::invalid("intensity", params.intensity, "must be finite and >= 0"));
        }
        params.jump.validate(d)?;
        let mut cov = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] = (0..m)
                    .map(|k| params.diffusion[i * m + k] * params.diffusion[j * m + k])
                    .sum();
            }
        }
        let mut l = cov.clone();
        linalg::cholesky_in_place(&mut l, d)
            .map_err(|e| Error::invalid("diffusion", f64::NAN, format!("covariance not SPD: {e}")))?;
        let eig = eigen_range(&cov, d);
        Ok(Self { p: params, cov, eig })
    }

    pub fn params(&self) -> &ConstantParams {
        &self.p
    }
}

/// Extreme eigenvalues of a small SPD matrix by Jacobi rotations.
fn eigen_range(a: &[f64], d: usize) -> (f64, f64) {
    let ev = symmetric_eigenvalues(a, d);
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Eigenvalues of a small symmetric matrix (cyclic Jacobi).
pub(crate) fn symmetric_eigenvalues(a: &[f64], d: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * d + j] * m[i * d + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p * d + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * d + q] - m[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..d).map(|i| m[i * d + i]).collect()
}

impl JumpDiffusionModel for ConstantModel {
    fn name(&self) -> &str {
        "custom"
    }
    fn dim(&self) -> usize {
        self.p.drift.len()
    }
    fn brownian_dim(&self) -> usize {
        self.p.brownian_dim
    }

    fn drift(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.p.drift);
    }
    fn drift_jacobian(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
    fn diffusion(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.p.diffusion);
    }
    fn covariance(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.cov);
    }
    fn covariance_grad(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
    fn covariance_hess_diag(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
    fn intensity(&self, _x: &[f64]) -> f64 {
        self.p.intensity
    }
    fn intensity_grad(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
    fn jump(&self, _x: &[f64], mark: &[f64], out: &mut [f64]) {
        out.copy_from_slice(mark);
    }
    fn sample_mark(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        self.p.jump.sample(rng, out);
    }
    fn bounds(&self) -> ModelBounds {
        ModelBounds {
            lambda_min: self.p.intensity,
            lambda_max: self.p.intensity,
            a_min: self.eig.0,
            a_max: self.eig.1,
            jump_sup: self.p.jump.sup(),
        }
    }
}
