//! Jump-diffusion model interface and the benchmark models.
//!
//! A model is a state dimension `d`, Brownian dimension `m` and the coefficient
//! maps of
//!
//! ```text
//! dX = mu(X) dt + sigma(X) dW + h(X-, R) dN,   intensity of N = lambda(X-),  R ~ nu
//! ```
//!
//! together with the analytic derivatives the parametrix weights need. All
//! matrix outputs are row-major slices written into caller buffers:
//!
//! * `drift_jacobian`: `d x d`, entry `(i, j)` is `d mu^i / d x_j`
//! * `diffusion`: `d x m`
//! * `covariance`: `d x d`, `a = sigma sigma^T`
//! * `covariance_grad`: `d x d x d`, entry `(k, i, j)` at `(k * d + i) * d + j` is `d a^{ij} / d x_k`
//! * `covariance_hess_diag`: `d x d`, entry `(i, j)` is `d^2 a^{ij} / d x_i d x_j`
//!
//! In every model here the jump map is `h(x, r) = r`: the state-independent part
//! of the jump law lives in [`JumpLaw`], which is a reconstruction since the
//! benchmark experiments never state `h` or `nu`.

mod affine;
mod assumptions;
mod constant;
mod payoff;
mod trig;

pub use affine::{build_model_affine, AffineModel, AffineParams};
pub use assumptions::{check_assumptions, check_assumptions_in_box, AssumptionReport};
pub use constant::{ConstantModel, ConstantParams};
pub use payoff::{payoff_call, payoff_indicator, Payoff, PayoffKind};
pub use trig::{build_model_trig, TrigModel, TrigParams};

use rand::{Rng, RngCore};

/// Declared coefficient bounds (Assumptions on intensity, ellipticity and jump size).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// `sup |h|_inf`.
    pub jump_sup: f64,
}

/// Coefficients of a jump-diffusion together with the derivatives used by the
/// parametrix weights. Implementations must be pure: evaluation may happen
/// concurrently from many trial workers.
pub trait JumpDiffusionModel: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn brownian_dim(&self) -> usize;

    fn drift(&self, x: &[f64], out: &mut [f64]);
    fn drift_jacobian(&self, x: &[f64], out: &mut [f64]);
    fn diffusion(&self, x: &[f64], out: &mut [f64]);
    fn covariance(&self, x: &[f64], out: &mut [f64]);
    fn covariance_grad(&self, x: &[f64], out: &mut [f64]);
    fn covariance_hess_diag(&self, x: &[f64], out: &mut [f64]);

    fn intensity(&self, x: &[f64]) -> f64;
    fn intensity_grad(&self, x: &[f64], out: &mut [f64]);

    /// Jump size `h(x, r)`.
    fn jump(&self, x: &[f64], mark: &[f64], out: &mut [f64]);
    /// Draws a mark `R ~ nu`.
    fn sample_mark(&self, rng: &mut dyn RngCore, out: &mut [f64]);

    fn bounds(&self) -> ModelBounds;

    /// Set when the model is known to break the boundedness / ellipticity
    /// assumptions (it may still be simulated).
    fn assumption_violating(&self) -> bool {
        false
    }
}

/// Law of the jump marks; the jump map is the identity on the mark.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpLaw {
    /// No displacement: arrivals only regenerate the diffusion.
    Zero,
    /// Deterministic jump of the given size.
    Fixed(Vec<f64>),
    /// Each coordinate uniform on `[0, width]`.
    UniformBox { width: f64 },
}

impl JumpLaw {
    pub const DEFAULT_WIDTH: f64 = 0.1;

    pub fn sup(&self) -> f64 {
        match self {
            JumpLaw::Zero => 0.0,
            JumpLaw::Fixed(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            JumpLaw::UniformBox { width } => width.abs(),
        }
    }

    pub(crate) fn sample(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        match self {
            JumpLaw::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            JumpLaw::Fixed(v) => out.copy_from_slice(v),
            JumpLaw::UniformBox { width } => {
                for o in out.iter_mut() {
                    *o = width * rng.random::<f64>();
                }
            }
        }
    }

    pub(crate) fn validate(&self, d: usize) -> crate::Result<()> {
        match self {
            JumpLaw::Fixed(v) if v.len() != d => Err(crate::Error::invalid(
                "jump",
                v.len() as f64,
                format!("fixed jump must have {d} components"),
            )),
            JumpLaw::Fixed(v) if v.iter().any(|x| !x.is_finite()) => Err(crate::Error::invalid(
                "jump",
                f64::NAN,
                "fixed jump must be finite",
            )),
            JumpLaw::UniformBox { width } if !(width.is_finite() && *width >= 0.0) => {
                Err(crate::Error::invalid("jump_width", *width, "must be finite and >= 0"))
            }
            _ => Ok(()),
        }
    }
}

impl Default for JumpLaw {
    fn default() -> Self {
        JumpLaw::UniformBox {
            width: Self::DEFAULT_WIDTH,
        }
    }
}

pub(crate) fn check_finite(name: &'static str, v: f64) -> crate::Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::invalid(name, v, "must be finite"))
    }
}
