//! Unbiased Monte Carlo estimation of `E f(X_T)` for multivariate
//! jump-diffusions with state-dependent drift, volatility, jump intensity and
//! jump size.
//!
//! The estimator samples jump times as exponentials whose rate is frozen at the
//! last post-jump state and corrects for the change of measure with an
//! auxiliary coordinate `A` (`dA = lambda(Y) dt + sigma_A dW'`). Between jumps
//! the augmented diffusion is handled by the parametrix method on random Beta
//! grids, which removes the Euler discretization bias in expectation.
//!
//! Modules:
//! * [`models`]: coefficient interface, benchmark models, payoffs, assumption checks
//! * [`parametrix`]: Beta grids, augmented Euler paths, Hermite weights, correction functional
//! * [`engine`]: the jump-diffusion estimator and the Euler/thinning baseline
//! * [`harness`]: parallel batches, statistics, references, sweeps and efficiency curves

pub mod engine;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod models;
pub mod parametrix;
pub mod rng;

pub use error::{Error, Result};
