//! Unbiased parametrix estimator for the augmented diffusion `Z = (Y, A)`,
//!
//! ```text
//! dY = mu(Y) dt + sigma(Y) dW,      dA = lambda(Y) dt + sigma_A dW',     Z_0 = (x, 0)
//! ```
//!
//! simulated by Euler steps on a random grid with Beta-law interarrivals and
//! reweighted by a signed product of Hermite-polynomial factors so that
//! `E[exp(-A_T) f(Y_T)] = E[exp(-A^pi_T) f(Y^pi_T) Theta_2]` holds exactly.

mod grid;
mod hermite;
mod params;
mod path;
mod weights;

pub use grid::{beta_psi, beta_survival, beta_quantile, sample_beta_grid, sample_beta_grid_into};
pub use hermite::{herm1, herm2};
pub use params::EstimatorParams;
pub use path::{simulate_augmented_path, simulate_augmented_path_with, AugmentedState, GridPath};
pub use weights::{
    correction_theta2, correction_theta2_pn, l1_theta, l2_theta, theta_aug, vartheta, SegmentOutcome, Workspace,
};
