use rand::Rng;
use rand_distr::StandardNormal;

use super::{EstimatorParams, Workspace};
use crate::error::Result;
use crate::models::JumpDiffusionModel;

/// A point `(y, a)` of the augmented process.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub y: Vec<f64>,
    pub abar: f64,
}

/// Euler path of `Z` on one segment: times `0 = t_0 < t_1 < ... < t_N < T_seg`
/// followed by `T_seg`, with one state per time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridPath {
    dim: usize,
    times: Vec<f64>,
    y: Vec<f64>,
    abar: Vec<f64>,
}

impl GridPath {
    pub fn with_dim(dim: usize) -> Self {
        Self {
            dim,
            ..Self::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All times including `0` and the segment end.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of interior grid points `N`.
    pub fn n_interior(&self) -> usize {
        self.times.len().saturating_sub(2)
    }

    pub fn segment_length(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn y(&self, k: usize) -> &[f64] {
        &self.y[k * self.dim..(k + 1) * self.dim]
    }

    pub fn abar(&self, k: usize) -> f64 {
        self.abar[k]
    }

    pub fn state(&self, k: usize) -> AugmentedState {
        AugmentedState {
            y: self.y(k).to_vec(),
            abar: self.abar[k],
        }
    }

    pub fn terminal_y(&self) -> &[f64] {
        self.y(self.times.len() - 1)
    }

    pub fn terminal_abar(&self) -> f64 {
        *self.abar.last().unwrap_or(&0.0)
    }

    /// Interarrival lengths `t_k - t_{k-1}` of every step, terminal step included.
    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.times.windows(2).map(|w| w[1] - w[0])
    }

    pub(crate) fn reset(&mut self, dim: usize, x0: &[f64]) {
        self.dim = dim;
        self.times.clear();
        self.y.clear();
        self.abar.clear();
        self.times.push(0.0);
        self.y.extend_from_slice(x0);
        self.abar.push(0.0);
    }

    pub(crate) fn push(&mut self, t: f64, y: &[f64], abar: f64) {
        self.times.push(t);
        self.y.extend_from_slice(y);
        self.abar.push(abar);
    }
}

/// Simulates `Z` from `(x0, 0)` through the interior `grid` and on to `seg`.
pub fn simulate_augmented_path<M, R>(
    model: &M,
    params: &EstimatorParams,
    x0: &[f64],
    grid: &[f64],
    seg: f64,
    rng: &mut R,
) -> Result<GridPath>
where
    M: JumpDiffusionModel + ?Sized,
    R: Rng + ?Sized,
{
    simulate_augmented_path_with(model, params, x0, grid, seg, || rng.sample(StandardNormal))
}

/// Same as [`simulate_augmented_path`] with an explicit standard-normal source,
/// consumed as `d` (or `m`) draws for `Y` then one for `A` per step.
pub fn simulate_augmented_path_with<M, F>(
    model: &M,
    params: &EstimatorParams,
    x0: &[f64],
    grid: &[f64],
    seg: f64,
    normal: F,
) -> Result<GridPath>
where
    M: JumpDiffusionModel + ?Sized,
    F: FnMut() -> f64,
{
    let mut ws = Workspace::new(model);
    let mut path = GridPath::with_dim(model.dim());
    ws.simulate_into(model, params.sigma_a, x0, grid, seg, &mut path, normal)?;
    Ok(path)
}
