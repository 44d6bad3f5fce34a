use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::constant::symmetric_eigenvalues;
use super::JumpDiffusionModel;
use crate::linalg;

const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-6;
const SYM_TOL: f64 = 1e-12;

/// Empirical check of the boundedness and ellipticity assumptions over a probe cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub probes: usize,
    pub lambda_observed: (f64, f64),
    pub intensity_ok: bool,
    pub eigen_observed: (f64, f64),
    /// Probes whose smallest covariance eigenvalue sits at or below the declared floor `a_min`.
    pub ellipticity_floor_hits: usize,
    pub cholesky_failures: usize,
    pub elliptic_ok: bool,
    /// `max |a - sigma sigma^T|` over the cloud.
    pub covariance_mismatch: f64,
    pub symmetric_ok: bool,
    pub jump_observed: f64,
    pub jump_ok: bool,
    /// Largest `|analytic - fd| / max(1, |analytic|)` over all derivative fields.
    pub derivative_max_err: f64,
    pub derivatives_ok: bool,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.intensity_ok && self.elliptic_ok && self.symmetric_ok && self.jump_ok && self.derivatives_ok
    }
}

/// Probes `probe_cloud_size` uniform points of `[-5, 5]^d`.
pub fn check_assumptions<M: JumpDiffusionModel + ?Sized>(model: &M, probe_cloud_size: usize) -> AssumptionReport {
    check_assumptions_in_box(model, probe_cloud_size, -5.0, 5.0, 0x5eed)
}

pub fn check_assumptions_in_box<M: JumpDiffusionModel + ?Sized>(
    model: &M,
    probe_cloud_size: usize,
    lo: f64,
    hi: f64,
    seed: u64,
) -> AssumptionReport {
    let probes = probe_cloud_size.max(1);
    let d = model.dim();
    let m = model.brownian_dim();
    let b = model.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut x = vec![0.0; d];
    let mut a = vec![0.0; d * d];
    let mut s = vec![0.0; d * m];
    let mut mark = vec![0.0; d];
    let mut jump = vec![0.0; d];

    let mut lam = (f64::INFINITY, f64::NEG_INFINITY);
    let mut eig = (f64::INFINITY, f64::NEG_INFINITY);
    let mut floor_hits = 0;
    let mut chol_fail = 0;
    let mut cov_err: f64 = 0.0;
    let mut asym: f64 = 0.0;
    let mut jump_sup: f64 = 0.0;
    let mut deriv_err: f64 = 0.0;

    for _ in 0..probes {
        for xi in x.iter_mut() {
            *xi = rng.random_range(lo..hi);
        }
        let l = model.intensity(&x);
        lam = (lam.0.min(l), lam.1.max(l));

        model.covariance(&x, &mut a);
        model.diffusion(&x, &mut s);
        for i in 0..d {
            for j in 0..d {
                let sst: f64 = (0..m).map(|k| s[i * m + k] * s[j * m + k]).sum();
                cov_err = cov_err.max((sst - a[i * d + j]).abs());
                asym = asym.max((a[i * d + j] - a[j * d + i]).abs());
            }
        }
        let ev = symmetric_eigenvalues(&a, d);
        let (emin, emax) = ev
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        eig = (eig.0.min(emin), eig.1.max(emax));
        if emin <= b.a_min {
            floor_hits += 1;
        }
        let mut l = a.clone();
        if linalg::cholesky_in_place(&mut l, d).is_err() {
            chol_fail += 1;
        }

        model.sample_mark(&mut rng, &mut mark);
        model.jump(&x, &mark, &mut jump);
        jump_sup = jump.iter().fold(jump_sup, |acc, v| acc.max(v.abs()));

        deriv_err = deriv_err.max(derivative_error(model, &x));
    }

    let intensity_ok = b.lambda_min > 0.0
        && b.lambda_min <= b.lambda_max
        && b.lambda_max.is_finite()
        && lam.0 >= b.lambda_min
        && lam.1 <= b.lambda_max;
    // floor hits are only meaningful for a clamped model; a sharp declared bound is
    // attained exactly by e.g. a constant covariance
    let floor_clamped = floor_hits > 0 && eig.0 < b.a_min * (1.0 + 1e-12) && model.assumption_violating();
    let elliptic_ok = b.a_min > 0.0
        && b.a_max.is_finite()
        && chol_fail == 0
        && !floor_clamped
        && eig.0 >= b.a_min * (1.0 - 1e-12)
        && eig.1 <= b.a_max * (1.0 + 1e-12);
    AssumptionReport {
        probes,
        lambda_observed: lam,
        intensity_ok,
        eigen_observed: eig,
        ellipticity_floor_hits: if model.assumption_violating() { floor_hits } else { 0 },
        cholesky_failures: chol_fail,
        elliptic_ok,
        covariance_mismatch: cov_err,
        symmetric_ok: asym <= SYM_TOL && cov_err <= SYM_TOL * (1.0 + eig.1.abs()),
        jump_observed: jump_sup,
        jump_ok: jump_sup <= b.jump_sup,
        derivative_max_err: deriv_err,
        derivatives_ok: deriv_err <= FD_TOL,
    }
}

fn rel_err(analytic: f64, fd: f64) -> f64 {
    (analytic - fd).abs() / analytic.abs().max(1.0)
}

/// Max relative error of the analytic derivative fields against central differences.
pub(crate) fn derivative_error<M: JumpDiffusionModel + ?Sized>(model: &M, x: &[f64]) -> f64 {
    let d = model.dim();
    let h = FD_STEP;
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    let mut jac = vec![0.0; d * d];
    let mut grad_a = vec![0.0; d * d * d];
    let mut hess = vec![0.0; d * d];
    let mut grad_l = vec![0.0; d];
    model.drift_jacobian(x, &mut jac);
    model.covariance_grad(x, &mut grad_a);
    model.covariance_hess_diag(x, &mut hess);
    model.intensity_grad(x, &mut grad_l);

    let (mut mu_p, mut mu_m) = (vec![0.0; d], vec![0.0; d]);
    let (mut a_p, mut a_m) = (vec![0.0; d * d], vec![0.0; d * d]);
    let (mut g_p, mut g_m) = (vec![0.0; d * d * d], vec![0.0; d * d * d]);
    let mut err: f64 = 0.0;
    for k in 0..d {
        xp.copy_from_slice(x);
        xm.copy_from_slice(x);
        xp[k] += h;
        xm[k] -= h;
        model.drift(&xp, &mut mu_p);
        model.drift(&xm, &mut mu_m);
        for i in 0..d {
            err = err.max(rel_err(jac[i * d + k], (mu_p[i] - mu_m[i]) / (2.0 * h)));
        }
        model.covariance(&xp, &mut a_p);
        model.covariance(&xm, &mut a_m);
        for ij in 0..d * d {
            err = err.max(rel_err(grad_a[k * d * d + ij], (a_p[ij] - a_m[ij]) / (2.0 * h)));
        }
        err = err.max(rel_err(
            grad_l[k],
            (model.intensity(&xp) - model.intensity(&xm)) / (2.0 * h),
        ));
        // d_k (d_j a^{kj}) from the analytic gradient
        model.covariance_grad(&xp, &mut g_p);
        model.covariance_grad(&xm, &mut g_m);
        for j in 0..d {
            let idx = (j * d + k) * d + j;
            err = err.max(rel_err(hess[k * d + j], (g_p[idx] - g_m[idx]) / (2.0 * h)));
        }
    }
    err
}
