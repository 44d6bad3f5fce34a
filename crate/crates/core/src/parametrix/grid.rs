use rand::Rng;

use crate::error::{Error, Result};

fn check_shape(seg: f64, gamma: f64, eps: f64) -> Result<f64> {
    if !(seg > 0.0 && seg.is_finite()) {
        return Err(Error::Domain {
            what: "segment length",
            value: seg,
            domain: "(0, inf)".into(),
        });
    }
    if !(gamma > 0.0 && gamma < 1.0) || !(eps > 0.0) {
        return Err(Error::Domain {
            what: "gamma",
            value: gamma,
            domain: "(0, 1) with epsilon > 0".into(),
        });
    }
    Ok(seg + eps)
}

/// Interarrival density `(1 - gamma) / (t^gamma (seg + eps)^(1 - gamma))` on `(0, seg + eps]`.
pub fn beta_psi(t: f64, seg: f64, gamma: f64, eps: f64) -> Result<f64> {
    let h = check_shape(seg, gamma, eps)?;
    if !(t > 0.0 && t <= h) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            domain: format!("(0, {h}]"),
        });
    }
    Ok(density(t, h, gamma))
}

/// Survival function `1 - (t / (seg + eps))^(1 - gamma)` on `[0, seg + eps]`.
pub fn beta_survival(t: f64, seg: f64, gamma: f64, eps: f64) -> Result<f64> {
    let h = check_shape(seg, gamma, eps)?;
    if !(t >= 0.0 && t <= h) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            domain: format!("[0, {h}]"),
        });
    }
    Ok(survival(t, h, gamma))
}

/// Inverse CDF `u -> (seg + eps) u^(1 / (1 - gamma))`.
pub fn beta_quantile(u: f64, seg: f64, gamma: f64, eps: f64) -> f64 {
    (seg + eps) * u.powf(1.0 / (1.0 - gamma))
}

#[inline]
pub(crate) fn density(t: f64, support: f64, gamma: f64) -> f64 {
    (1.0 - gamma) / (t.powf(gamma) * support.powf(1.0 - gamma))
}

#[inline]
pub(crate) fn survival(t: f64, support: f64, gamma: f64) -> f64 {
    1.0 - (t / support).powf(1.0 - gamma)
}

/// Interior grid points of `(0, seg)`: partial sums of i.i.d. Beta interarrivals
/// that stay strictly below `seg`. May be empty.
pub fn sample_beta_grid<R: Rng + ?Sized>(seg: f64, gamma: f64, eps: f64, t_min: f64, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::new();
    sample_beta_grid_into(seg, gamma, eps, t_min, rng, &mut out);
    out
}

pub fn sample_beta_grid_into<R: Rng + ?Sized>(
    seg: f64,
    gamma: f64,
    eps: f64,
    t_min: f64,
    rng: &mut R,
    out: &mut Vec<f64>,
) {
    out.clear();
    let support = seg + eps;
    let expo = 1.0 / (1.0 - gamma);
    let mut t = 0.0;
    let mut last = 0.0;
    loop {
        let u: f64 = rng.random();
        t += support * u.powf(expo);
        if t >= seg {
            break;
        }
        if t - last <= t_min || seg - t <= t_min {
            continue;
        }
        out.push(t);
        last = t;
    }
}
