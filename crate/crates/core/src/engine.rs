//! Jump-diffusion estimators.
//!
//! [`ParametrixEngine`] produces one realization of the unbiased estimator
//! `U(x, T)`: arrival times are drawn as exponentials with the rate frozen at
//! the last post-jump state, each inter-arrival segment is handled by the
//! parametrix estimator of the augmented diffusion, and the likelihood-ratio
//! factors are multiplied together. [`EulerEngine`] is the biased fixed-grid
//! Euler scheme with jumps by thinning, used as the baseline and for references.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::models::{JumpDiffusionModel, Payoff};
use crate::parametrix::{sample_beta_grid_into, EstimatorParams, GridPath, Workspace};

/// One realization of an estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub value: f64,
    /// Arrivals before the horizon (exponential arrivals for the parametrix
    /// engine, accepted thinning candidates for Euler).
    pub n_jumps: u32,
    /// Simulated grid points over all segments, terminal points excluded.
    pub n_grid_points_total: u32,
    pub n_segments: u32,
    pub wall_ns: u64,
}

/// Exponential variate by inversion. A zero rate never fires.
pub fn sample_jump_time<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    let u = 1.0 - rng.random::<f64>();
    exp_from_uniform(rate, u)
}

/// `-ln(u) / rate` for `u` in `(0, 1]`.
#[inline]
pub fn exp_from_uniform(rate: f64, u: f64) -> f64 {
    debug_assert!(rate >= 0.0);
    if rate == 0.0 {
        return f64::INFINITY;
    }
    -u.ln() / rate
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EngineOptions {
    /// Clamp on `|multiplier|`. Introduces bias; off unless diagnosing blow-ups.
    pub multiplier_cap: Option<f64>,
    /// Recompute the per-segment exponential compensators and check they
    /// multiply to the single global `exp(-sigma_A^2 T / 2)`.
    pub check_factor_telescoping: bool,
    /// Forces the first arrival time (test hook).
    pub first_arrival: Option<f64>,
}

/// Per-worker state of the parametrix jump-diffusion estimator.
pub struct ParametrixEngine<'a, M: JumpDiffusionModel + ?Sized> {
    model: &'a M,
    payoff: Payoff,
    params: EstimatorParams,
    opts: EngineOptions,
    ws: Workspace,
    path: GridPath,
    grid: Vec<f64>,
    x: Vec<f64>,
    mark: Vec<f64>,
    jump: Vec<f64>,
}

impl<'a, M: JumpDiffusionModel + ?Sized> ParametrixEngine<'a, M> {
    pub fn new(model: &'a M, payoff: Payoff, params: EstimatorParams) -> Result<Self> {
        params.validate()?;
        let d = model.dim();
        Ok(Self {
            model,
            payoff,
            params,
            opts: EngineOptions::default(),
            ws: Workspace::new(model),
            path: GridPath::with_dim(d),
            grid: Vec::with_capacity(16),
            x: vec![0.0; d],
            mark: vec![0.0; d],
            jump: vec![0.0; d],
        })
    }

    pub fn with_options(mut self, opts: EngineOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn params(&self) -> &EstimatorParams {
        &self.params
    }

    fn simulate_segment<R: Rng>(&mut self, seg: f64, rng: &mut R) -> Result<()> {
        let p = &self.params;
        sample_beta_grid_into(seg, p.gamma, p.epsilon, p.t_min, rng, &mut self.grid);
        self.ws
            .simulate_into(self.model, p.sigma_a, &self.x, &self.grid, seg, &mut self.path, || {
                rng.sample(StandardNormal)
            })
    }

    /// One draw of `U(x0, T)`.
    pub fn run<R: Rng>(&mut self, x0: &[f64], rng: &mut R) -> Result<TrialResult> {
        let start = Instant::now();
        let horizon = self.params.horizon;
        let sa2 = self.params.sigma_a * self.params.sigma_a;
        self.x.copy_from_slice(x0);

        let mut multiplier = 1.0;
        let mut elapsed = 0.0;
        let mut n_jumps = 0u32;
        let mut n_grid = 0u32;
        let mut log_compensators = 0.0;

        let mut xi = match self.opts.first_arrival {
            Some(t) => t,
            None => sample_jump_time(self.model.intensity(&self.x), rng),
        };
        while elapsed + xi < horizon {
            self.simulate_segment(xi, rng)?;
            n_grid += self.path.n_interior() as u32;
            let w = self.ws.l1_weight(self.model, &self.params, &self.path)?;
            multiplier *= w;
            if let Some(cap) = self.opts.multiplier_cap {
                if multiplier.abs() > cap {
                    log::debug!("multiplier {multiplier:e} clamped to {cap:e}");
                    multiplier = multiplier.signum() * cap;
                }
            }
            if self.opts.check_factor_telescoping {
                log_compensators += -sa2 * xi / 2.0;
            }

            let y_end = self.path.terminal_y();
            self.model.sample_mark(rng, &mut self.mark);
            self.model.jump(y_end, &self.mark, &mut self.jump);
            for ((x, y), j) in self.x.iter_mut().zip(y_end).zip(&self.jump) {
                *x = y + j;
            }
            elapsed += xi;
            n_jumps += 1;
            xi = sample_jump_time(self.model.intensity(&self.x), rng);
        }

        let last = horizon - elapsed;
        self.simulate_segment(last, rng)?;
        n_grid += self.path.n_interior() as u32;
        let terminal = if multiplier == 0.0 {
            0.0
        } else {
            self.ws.l2_weight(self.model, &self.params, &self.path, &self.payoff)?
        };
        let global = (-sa2 * horizon / 2.0).exp();
        if self.opts.check_factor_telescoping {
            log_compensators += -sa2 * last / 2.0;
            let per_segment = log_compensators.exp();
            if (per_segment - global).abs() > 1e-12 * global {
                return Err(Error::Numerical(format!(
                    "segment compensators {per_segment:e} != global {global:e}"
                )));
            }
        }
        let value = global * multiplier * terminal;
        if !value.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite estimate (multiplier {multiplier:e}, terminal weight {terminal:e})"
            )));
        }
        Ok(TrialResult {
            value,
            n_jumps,
            n_grid_points_total: n_grid,
            n_segments: n_jumps + 1,
            wall_ns: start.elapsed().as_nanos() as u64,
        })
    }
}

/// Allocating convenience wrapper around [`ParametrixEngine::run`].
pub fn estimate_once<M, R>(model: &M, f: &Payoff, x0: &[f64], params: &EstimatorParams, rng: &mut R) -> Result<TrialResult>
where
    M: JumpDiffusionModel + ?Sized,
    R: Rng,
{
    ParametrixEngine::new(model, *f, *params)?.run(x0, rng)
}

/// Thinning decision for a candidate arrival at state `x` under dominating rate `rate_max`.
#[inline]
pub fn thinning_accept<M: JumpDiffusionModel + ?Sized>(model: &M, x: &[f64], rate_max: f64, u: f64) -> bool {
    u * rate_max < model.intensity(x)
}

/// Fixed-grid Euler-Maruyama with jumps generated by thinning against the
/// model's declared `lambda_max`. Candidate arrivals become extra grid points.
pub struct EulerEngine<'a, M: JumpDiffusionModel + ?Sized> {
    model: &'a M,
    payoff: Payoff,
    horizon: f64,
    steps: usize,
    rate_max: f64,
    x: Vec<f64>,
    mu: Vec<f64>,
    sig: Vec<f64>,
    noise: Vec<f64>,
    mark: Vec<f64>,
    jump: Vec<f64>,
}

impl<'a, M: JumpDiffusionModel + ?Sized> EulerEngine<'a, M> {
    pub fn new(model: &'a M, payoff: Payoff, horizon: f64, steps: usize) -> Result<Self> {
        if steps < 1 {
            return Err(Error::invalid("euler_steps", steps as f64, "must be >= 1"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid("horizon", horizon, "must be finite and > 0"));
        }
        let rate_max = model.bounds().lambda_max;
        if !(rate_max >= 0.0 && rate_max.is_finite()) {
            return Err(Error::invalid("lambda_max", rate_max, "thinning needs a finite dominating rate"));
        }
        let d = model.dim();
        let m = model.brownian_dim();
        Ok(Self {
            model,
            payoff,
            horizon,
            steps,
            rate_max,
            x: vec![0.0; d],
            mu: vec![0.0; d],
            sig: vec![0.0; d * m],
            noise: vec![0.0; m],
            mark: vec![0.0; d],
            jump: vec![0.0; d],
        })
    }

    fn step<R: Rng>(&mut self, dt: f64, rng: &mut R) {
        let d = self.x.len();
        let m = self.noise.len();
        self.model.drift(&self.x, &mut self.mu);
        self.model.diffusion(&self.x, &mut self.sig);
        for z in self.noise.iter_mut() {
            *z = rng.sample(StandardNormal);
        }
        let sq = dt.sqrt();
        for i in 0..d {
            let mut s = 0.0;
            for k in 0..m {
                s += self.sig[i * m + k] * self.noise[k];
            }
            self.x[i] += self.mu[i] * dt + sq * s;
        }
    }

    pub fn run<R: Rng>(&mut self, x0: &[f64], rng: &mut R) -> Result<TrialResult> {
        let start = Instant::now();
        self.x.copy_from_slice(x0);
        let mut t = 0.0;
        let mut candidate = sample_jump_time(self.rate_max, rng);
        let mut n_jumps = 0u32;
        let mut n_candidates = 0u32;
        for k in 1..=self.steps {
            let target = self.horizon * k as f64 / self.steps as f64;
            while candidate < target {
                self.step(candidate - t, rng);
                t = candidate;
                n_candidates += 1;
                let u: f64 = rng.random();
                if thinning_accept(self.model, &self.x, self.rate_max, u) {
                    self.model.sample_mark(rng, &mut self.mark);
                    self.model.jump(&self.x, &self.mark, &mut self.jump);
                    for (x, j) in self.x.iter_mut().zip(&self.jump) {
                        *x += j;
                    }
                    n_jumps += 1;
                }
                candidate = t + sample_jump_time(self.rate_max, rng);
            }
            self.step(target - t, rng);
            t = target;
        }
        // a bounded payoff can mask a blown-up state
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite terminal state {:?}", self.x)));
        }
        let value = self.payoff.eval(&self.x);
        if !value.is_finite() {
            return Err(Error::Numerical(format!("non-finite payoff at {:?}", self.x)));
        }
        Ok(TrialResult {
            value,
            n_jumps,
            n_grid_points_total: (self.steps - 1) as u32 + n_candidates,
            n_segments: n_jumps + 1,
            wall_ns: start.elapsed().as_nanos() as u64,
        })
    }

    pub fn terminal_state(&self) -> &[f64] {
        &self.x
    }
}

pub fn estimate_once_euler_baseline<M, R>(
    model: &M,
    f: &Payoff,
    x0: &[f64],
    horizon: f64,
    p_steps: usize,
    rng: &mut R,
) -> Result<TrialResult>
where
    M: JumpDiffusionModel + ?Sized,
    R: Rng,
{
    EulerEngine::new(model, *f, horizon, p_steps)?.run(x0, rng)
}
