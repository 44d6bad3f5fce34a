use crate::error::{Error, Result};
use crate::linalg;

fn solve_parts(m: &[f64], x: &[f64]) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    let d = x.len();
    if m.len() != d * d {
        return Err(Error::Numerical(format!("matrix has {} entries, expected {}", m.len(), d * d)));
    }
    let mut l = m.to_vec();
    linalg::cholesky_in_place(&mut l, d)?;
    let mut v = x.to_vec();
    linalg::cholesky_solve_in_place(&l, d, &mut v);
    let mut inv = vec![0.0; d * d];
    let mut col = vec![0.0; d];
    linalg::cholesky_inverse(&l, d, &mut col, &mut inv);
    Ok((d, v, inv))
}

/// First-order Hermite polynomial `H^i_M(x) = -(M^{-1} x)_i` (0-based `i`).
pub fn herm1(m: &[f64], x: &[f64], i: usize) -> Result<f64> {
    let (_, v, _) = solve_parts(m, x)?;
    Ok(-v[i])
}

/// Second-order Hermite polynomial `H^{ij}_M(x) = (M^{-1}x)_i (M^{-1}x)_j - (M^{-1})_{ij}`.
pub fn herm2(m: &[f64], x: &[f64], i: usize, j: usize) -> Result<f64> {
    let (d, v, inv) = solve_parts(m, x)?;
    Ok(v[i] * v[j] - inv[i * d + j])
}
