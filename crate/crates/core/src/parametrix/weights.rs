use super::grid::{density, survival};
use super::{EstimatorParams, GridPath};
use crate::error::{Error, Result};
use crate::linalg;
use crate::models::{JumpDiffusionModel, Payoff};

/// Weight and terminal point of one segment estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentOutcome {
    /// Signed weight, including the `1/psi` and `1/Psi` factors.
    pub weight: f64,
    pub terminal_y: Vec<f64>,
    pub terminal_abar: f64,
}

/// Scratch buffers for path simulation and weight evaluation, sized for one model.
/// One per trial worker; reused across steps and segments.
#[derive(Debug, Clone)]
pub struct Workspace {
    d: usize,
    m: usize,
    mu1: Vec<f64>,
    mu2: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
    fac: Vec<f64>,
    minv: Vec<f64>,
    col: Vec<f64>,
    v: Vec<f64>,
    da: Vec<f64>,
    d2a: Vec<f64>,
    dmu: Vec<f64>,
    sig: Vec<f64>,
    noise: Vec<f64>,
    dy: Vec<f64>,
    y: Vec<f64>,
}

impl Workspace {
    pub fn new<M: JumpDiffusionModel + ?Sized>(model: &M) -> Self {
        let d = model.dim();
        let m = model.brownian_dim();
        Self {
            d,
            m,
            mu1: vec![0.0; d],
            mu2: vec![0.0; d],
            a1: vec![0.0; d * d],
            a2: vec![0.0; d * d],
            fac: vec![0.0; d * d],
            minv: vec![0.0; d * d],
            col: vec![0.0; d],
            v: vec![0.0; d],
            da: vec![0.0; d * d * d],
            d2a: vec![0.0; d * d],
            dmu: vec![0.0; d * d],
            sig: vec![0.0; d * m],
            noise: vec![0.0; m.max(d)],
            dy: vec![0.0; d],
            y: vec![0.0; d],
        }
    }

    /// Euler scheme for `Z` from `(x0, 0)` over `grid` then up to `seg`.
    #[allow(clippy::too_many_arguments)]
    pub fn simulate_into<M, F>(
        &mut self,
        model: &M,
        sigma_a: f64,
        x0: &[f64],
        grid: &[f64],
        seg: f64,
        path: &mut GridPath,
        mut normal: F,
    ) -> Result<()>
    where
        M: JumpDiffusionModel + ?Sized,
        F: FnMut() -> f64,
    {
        let d = self.d;
        path.reset(d, x0);
        self.y.copy_from_slice(x0);
        let mut abar = 0.0;
        let mut t_prev = 0.0;
        for &t in grid.iter().chain(std::iter::once(&seg)) {
            let dt = t - t_prev;
            let sq = dt.sqrt();
            model.drift(&self.y, &mut self.mu1);
            let lam = model.intensity(&self.y);
            if self.m == d {
                model.covariance(&self.y, &mut self.fac);
                linalg::cholesky_in_place(&mut self.fac, d).map_err(|e| {
                    Error::Numerical(format!("covariance factorization failed at state {:?}: {e}", self.y))
                })?;
                for z in self.noise[..d].iter_mut() {
                    *z = normal();
                }
                linalg::lower_mul(&self.fac, d, &self.noise[..d], &mut self.dy);
            } else {
                model.diffusion(&self.y, &mut self.sig);
                for z in self.noise[..self.m].iter_mut() {
                    *z = normal();
                }
                linalg::mat_vec(&self.sig, d, self.m, &self.noise[..self.m], &mut self.dy);
            }
            for i in 0..d {
                self.y[i] += self.mu1[i] * dt + sq * self.dy[i];
            }
            abar += lam * dt + sigma_a * sq * normal();
            path.push(t, &self.y, abar);
            t_prev = t;
        }
        Ok(())
    }

    /// Diffusion part of the parametrix weight between `y1` and `y2` over time `t`.
    pub fn vartheta<M: JumpDiffusionModel + ?Sized>(&mut self, model: &M, t: f64, y1: &[f64], y2: &[f64]) -> Result<f64> {
        let d = self.d;
        model.drift(y1, &mut self.mu1);
        model.covariance(y1, &mut self.a1);
        model.drift(y2, &mut self.mu2);
        model.covariance(y2, &mut self.a2);
        model.covariance_grad(y2, &mut self.da);
        model.covariance_hess_diag(y2, &mut self.d2a);
        model.drift_jacobian(y2, &mut self.dmu);

        // Hermite polynomials of the Gaussian kernel with covariance t a(y1)
        for (f, a) in self.fac.iter_mut().zip(&self.a1) {
            *f = t * a;
        }
        linalg::cholesky_in_place(&mut self.fac, d)
            .map_err(|e| Error::Numerical(format!("Hermite matrix t*a({y1:?}) with t = {t:e}: {e}")))?;
        for i in 0..d {
            self.v[i] = y2[i] - y1[i] - t * self.mu1[i];
        }
        linalg::cholesky_solve_in_place(&self.fac, d, &mut self.v);
        linalg::cholesky_inverse(&self.fac, d, &mut self.col, &mut self.minv);

        let herm1 = |i: usize| -self.v[i];
        let mut diffusion_terms = 0.0;
        for i in 0..d {
            for j in 0..d {
                let ij = i * d + j;
                let dj_aij = self.da[(j * d + i) * d + j];
                let di_aij = self.da[(i * d + i) * d + j];
                let herm2 = self.v[i] * self.v[j] - self.minv[ij];
                diffusion_terms += self.d2a[ij]
                    + dj_aij * herm1(i)
                    + di_aij * herm1(j)
                    + (self.a2[ij] - self.a1[ij]) * herm2;
            }
        }
        let mut drift_terms = 0.0;
        for i in 0..d {
            drift_terms += self.dmu[i * d + i] + (self.mu2[i] - self.mu1[i]) * herm1(i);
        }
        Ok(0.5 * diffusion_terms - drift_terms)
    }

    /// Augmented weight: `vartheta` plus the intensity-drift term of the `A` coordinate.
    #[allow(clippy::too_many_arguments)]
    pub fn theta_aug<M: JumpDiffusionModel + ?Sized>(
        &mut self,
        model: &M,
        sigma_a: f64,
        t: f64,
        y1: &[f64],
        abar1: f64,
        y2: &[f64],
        abar2: f64,
    ) -> Result<f64> {
        let base = self.vartheta(model, t, y1, y2)?;
        let l1 = model.intensity(y1);
        let l2 = model.intensity(y2);
        Ok(base + (l2 - l1) * (abar2 - abar1 - l1 * t) / (t * sigma_a * sigma_a))
    }

    /// Product of `theta / psi` over interior steps, stopping early on an exact zero.
    fn theta_product<M: JumpDiffusionModel + ?Sized>(
        &mut self,
        model: &M,
        params: &EstimatorParams,
        path: &GridPath,
        divide_by_density: bool,
    ) -> Result<f64> {
        let seg = path.segment_length();
        let support = seg + params.epsilon;
        let times = path.times();
        let mut prod = 1.0;
        for k in 1..=path.n_interior() {
            let dt = times[k] - times[k - 1];
            let th = self.theta_aug(
                model,
                params.sigma_a,
                dt,
                path.y(k - 1),
                path.abar(k - 1),
                path.y(k),
                path.abar(k),
            )?;
            prod *= if divide_by_density {
                th / density(dt, support, params.gamma)
            } else {
                th
            };
            if prod == 0.0 {
                break;
            }
        }
        Ok(prod)
    }

    /// Correction functional in survival/density form.
    pub fn theta2<M: JumpDiffusionModel + ?Sized>(
        &mut self,
        model: &M,
        params: &EstimatorParams,
        path: &GridPath,
    ) -> Result<f64> {
        let seg = path.segment_length();
        let n = path.n_interior();
        let last = path.times()[n];
        let prod = self.theta_product(model, params, path, true)?;
        Ok(prod / survival(seg - last, seg + params.epsilon, params.gamma))
    }

    /// Correction functional via the closed-form grid density `p_n`.
    pub fn theta2_pn<M: JumpDiffusionModel + ?Sized>(
        &mut self,
        model: &M,
        params: &EstimatorParams,
        path: &GridPath,
    ) -> Result<f64> {
        let seg = path.segment_length();
        let support = seg + params.epsilon;
        let g = params.gamma;
        let n = path.n_interior();
        let times = path.times();
        let mut p_n = (1.0 - ((seg - times[n]) / support).powf(1.0 - g))
            * ((1.0 - g) / support.powf(1.0 - g)).powi(n as i32);
        for k in 1..=n {
            p_n /= (times[k] - times[k - 1]).powf(g);
        }
        let prod = self.theta_product(model, params, path, false)?;
        Ok(prod / p_n)
    }

    /// `exp(-A_T + T lambda(x0))` for a path started at `(x0, 0)`.
    fn exponential_factor<M: JumpDiffusionModel + ?Sized>(model: &M, path: &GridPath) -> f64 {
        (-path.terminal_abar() + path.segment_length() * model.intensity(path.y(0))).exp()
    }

    /// Weight of the jump-segment estimator: `exp(-A_T + T lambda(x0)) lambda(Y_T)/lambda(x0) Theta_2`.
    pub fn l1_weight<M: JumpDiffusionModel + ?Sized>(
        &mut self,
        model: &M,
        params: &EstimatorParams,
        path: &GridPath,
    ) -> Result<f64> {
        let th = self.theta2(model, params, path)?;
        if th == 0.0 {
            return Ok(0.0);
        }
        let ratio = model.intensity(path.terminal_y()) / model.intensity(path.y(0));
        Ok(Self::exponential_factor(model, path) * ratio * th)
    }

    /// Weight of the terminal-segment estimator: `exp(-A_T + T lambda(x0)) f(Y_T) Theta_2`.
    pub fn l2_weight<M: JumpDiffusionModel + ?Sized>(
        &mut self,
        model: &M,
        params: &EstimatorParams,
        path: &GridPath,
        f: &Payoff,
    ) -> Result<f64> {
        let fy = f.eval(path.terminal_y());
        if fy == 0.0 {
            return Ok(0.0);
        }
        let th = self.theta2(model, params, path)?;
        Ok(Self::exponential_factor(model, path) * fy * th)
    }
}

pub fn vartheta<M: JumpDiffusionModel + ?Sized>(model: &M, t: f64, y1: &[f64], y2: &[f64]) -> Result<f64> {
    check_time(t)?;
    Workspace::new(model).vartheta(model, t, y1, y2)
}

pub fn theta_aug<M: JumpDiffusionModel + ?Sized>(
    model: &M,
    params: &EstimatorParams,
    t: f64,
    z1: &super::AugmentedState,
    z2: &super::AugmentedState,
) -> Result<f64> {
    check_time(t)?;
    Workspace::new(model).theta_aug(model, params.sigma_a, t, &z1.y, z1.abar, &z2.y, z2.abar)
}

pub fn correction_theta2<M: JumpDiffusionModel + ?Sized>(model: &M, params: &EstimatorParams, path: &GridPath) -> Result<f64> {
    Workspace::new(model).theta2(model, params, path)
}

pub fn correction_theta2_pn<M: JumpDiffusionModel + ?Sized>(
    model: &M,
    params: &EstimatorParams,
    path: &GridPath,
) -> Result<f64> {
    Workspace::new(model).theta2_pn(model, params, path)
}

pub fn l1_theta<M: JumpDiffusionModel + ?Sized>(model: &M, params: &EstimatorParams, path: &GridPath) -> Result<SegmentOutcome> {
    let weight = Workspace::new(model).l1_weight(model, params, path)?;
    Ok(outcome(weight, path))
}

pub fn l2_theta<M: JumpDiffusionModel + ?Sized>(
    model: &M,
    params: &EstimatorParams,
    path: &GridPath,
    f: &Payoff,
) -> Result<SegmentOutcome> {
    let weight = Workspace::new(model).l2_weight(model, params, path, f)?;
    Ok(outcome(weight, path))
}

fn outcome(weight: f64, path: &GridPath) -> SegmentOutcome {
    SegmentOutcome {
        weight,
        terminal_y: path.terminal_y().to_vec(),
        terminal_abar: path.terminal_abar(),
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "t",
            value: t,
            domain: "(0, inf)".into(),
        })
    }
}
