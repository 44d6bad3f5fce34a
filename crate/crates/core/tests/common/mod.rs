//! Independent oracles shared by the integration suites. Nothing here calls
//! into the estimator code paths being checked.
#![allow(dead_code)]

use statrs::distribution::{Continuous, ContinuousCDF, Discrete, Normal, Poisson};
use unbiased_jd::models::{build_model_trig, JumpLaw, TrigModel, TrigParams};

pub fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

fn poisson_pmf(mean: f64, n: u64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    Poisson::new(mean).unwrap().pmf(n)
}

/// `E (x0 + W_T + delta N_T - k)_+` with `N_T ~ Poisson(lambda T)` independent of `W`.
pub fn poisson_gaussian_call(lambda: f64, horizon: f64, delta: f64, x0: f64, k: f64) -> f64 {
    let n01 = std_normal();
    let sd = horizon.sqrt();
    let mut acc = 0.0;
    for n in 0..200u64 {
        let w = poisson_pmf(lambda * horizon, n);
        let m = x0 + delta * n as f64 - k;
        acc += w * (m * n01.cdf(m / sd) + sd * n01.pdf(m / sd));
        if n as f64 > lambda * horizon && w < 1e-18 {
            break;
        }
    }
    acc
}

/// `P(x0 + W_T + delta N_T > k)`.
pub fn poisson_gaussian_tail(lambda: f64, horizon: f64, delta: f64, x0: f64, k: f64) -> f64 {
    let n01 = std_normal();
    (0..200u64)
        .map(|n| poisson_pmf(lambda * horizon, n) * n01.sf((k - x0 - delta * n as f64) / horizon.sqrt()))
        .sum()
}

/// Cell-averaged transition density of a scalar diffusion on `[lo, hi]`.
pub struct Density {
    pub lo: f64,
    pub dx: f64,
    pub p: Vec<f64>,
}

impl Density {
    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.dx
    }

    pub fn mass(&self) -> f64 {
        self.p.iter().sum::<f64>() * self.dx
    }

    pub fn moment(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.p.iter().enumerate().map(|(i, p)| p * g(self.center(i))).sum::<f64>() * self.dx
    }

    /// `P(X > y)`, exact for the piecewise-constant density.
    pub fn survival(&self, y: f64) -> f64 {
        let s = (y - self.lo) / self.dx;
        if s <= 0.0 {
            return self.mass();
        }
        let n = self.p.len();
        if s >= n as f64 {
            return 0.0;
        }
        let i = s.floor() as usize;
        let frac = s - i as f64;
        let tail: f64 = self.p[i + 1..].iter().sum();
        (tail + (1.0 - frac) * self.p[i]) * self.dx
    }
}

/// Forward Kolmogorov equation `p_t = -(mu p)_x + (a p)_xx / 2` for a scalar
/// diffusion started at `x0`, solved by Crank-Nicolson in conservative flux
/// form with zero-flux walls. The point mass is replaced by the one-step Gaussian
/// at `t0` and the first steps are damped with implicit half steps.
pub struct FokkerPlanck {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
    pub steps: usize,
    pub t0: f64,
}

impl Default for FokkerPlanck {
    fn default() -> Self {
        Self {
            lo: -8.0,
            hi: 9.0,
            cells: 17_000,
            steps: 4_000,
            t0: 1e-3,
        }
    }
}

impl FokkerPlanck {
    pub fn solve(&self, mu: impl Fn(f64) -> f64, a: impl Fn(f64) -> f64, x0: f64, horizon: f64) -> Density {
        let n = self.cells;
        let dx = (self.hi - self.lo) / n as f64;
        let xc = |i: usize| self.lo + (i as f64 + 0.5) * dx;

        let mean = x0 + mu(x0) * self.t0;
        let init = Normal::new(mean, (a(x0) * self.t0).sqrt()).unwrap();
        let mut p: Vec<f64> = (0..n)
            .map(|i| {
                let l = self.lo + i as f64 * dx;
                (init.cdf(l + dx) - init.cdf(l)) / dx
            })
            .collect();

        // Flux through the right face of cell i: F = cp[i] p_i + dp[i] p_{i+1}.
        let av: Vec<f64> = (0..n).map(|i| a(xc(i))).collect();
        let cp: Vec<f64> = (0..n - 1).map(|i| 0.5 * mu(xc(i) + 0.5 * dx) + av[i] / (2.0 * dx)).collect();
        let dp: Vec<f64> = (0..n - 1).map(|i| 0.5 * mu(xc(i) + 0.5 * dx) - av[i + 1] / (2.0 * dx)).collect();
        // (L p)_i = lower_i p_{i-1} + diag_i p_i + upper_i p_{i+1}.
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            if i + 1 < n {
                diag[i] -= cp[i] / dx;
                upper[i] = -dp[i] / dx;
            }
            if i > 0 {
                lower[i] = cp[i - 1] / dx;
                diag[i] += dp[i - 1] / dx;
            }
        }

        let dt = (horizon - self.t0) / self.steps as f64;
        let apply = |p: &[f64], out: &mut [f64], scale: f64| {
            for i in 0..n {
                let mut s = diag[i] * p[i];
                if i > 0 {
                    s += lower[i] * p[i - 1];
                }
                if i + 1 < n {
                    s += upper[i] * p[i + 1];
                }
                out[i] = p[i] + scale * s;
            }
        };
        let mut rhs = vec![0.0; n];
        let mut cprime = vec![0.0; n];
        let mut solve = |rhs: &mut [f64], scale: f64| {
            // Thomas algorithm for (I - scale L) x = rhs, in place.
            let b0 = 1.0 - scale * diag[0];
            cprime[0] = -scale * upper[0] / b0;
            rhs[0] /= b0;
            for i in 1..n {
                let a_i = -scale * lower[i];
                let denom = 1.0 - scale * diag[i] - a_i * cprime[i - 1];
                cprime[i] = -scale * upper[i] / denom;
                rhs[i] = (rhs[i] - a_i * rhs[i - 1]) / denom;
            }
            for i in (0..n - 1).rev() {
                rhs[i] -= cprime[i] * rhs[i + 1];
            }
        };

        let damped = 4;
        for _ in 0..damped {
            rhs.copy_from_slice(&p);
            solve(&mut rhs, 0.5 * dt);
            std::mem::swap(&mut p, &mut rhs);
        }
        for _ in 0..self.steps - damped / 2 {
            apply(&p, &mut rhs, 0.5 * dt);
            solve(&mut rhs, 0.5 * dt);
            std::mem::swap(&mut p, &mut rhs);
        }
        Density { lo: self.lo, dx, p }
    }
}

/// `P(X1 + X2 > k)` for independent `X1 ~ p1`, `X2 ~ p2`.
pub fn sum_exceeds(p1: &Density, p2: &Density, k: f64) -> f64 {
    p1.p.iter()
        .enumerate()
        .map(|(i, p)| p * p2.survival(k - p1.center(i)))
        .sum::<f64>()
        * p1.dx
}

/// Default trig coefficients with constant intensity `lambda` and no jump displacement.
pub fn trig_phantom(lambda: f64) -> TrigModel {
    build_model_trig(TrigParams {
        lambda: [lambda, 0.0, 0.0, 0.0],
        jump: JumpLaw::Zero,
        ..TrigParams::default()
    })
    .unwrap()
}

/// Independent oracle for `P(X1_T + X2_T > k)` under the default trig
/// coefficients without jumps, started at `x0`.
pub fn trig_indicator_oracle(x0: [f64; 2], horizon: f64, k: f64, fp: &FokkerPlanck) -> f64 {
    let p = TrigParams::default();
    let (m1, m2, s1, s2) = (p.mu1, p.mu2, p.sigma1, p.sigma2);
    let d1 = fp.solve(|x| m1 - m2 * x.sin(), |x| s1 + s2 * x.sin(), x0[0], horizon);
    let d2 = fp.solve(|x| m1 - m2 * x.cos(), |x| s1 + s2 * x.sin(), x0[1], horizon);
    sum_exceeds(&d1, &d2, k)
}

/// `|a - b| <= n * sqrt(sa^2 + sb^2)`.
pub fn within_se(a: f64, sa: f64, b: f64, sb: f64, n: f64) -> bool {
    (a - b).abs() <= n * (sa * sa + sb * sb).sqrt()
}
