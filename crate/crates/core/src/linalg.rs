//! Small dense kernels on row-major `d x d` slices.
//!
//! State dimensions here are tiny (two in the benchmark models) and these run
//! several times per Euler step, so everything works in caller-owned buffers.

use crate::error::{Error, Result};

/// In-place lower Cholesky factor of the SPD matrix `m` (row-major, `d x d`).
/// The strict upper triangle is zeroed.
pub fn cholesky_in_place(m: &mut [f64], d: usize) -> Result<()> {
    debug_assert_eq!(m.len(), d * d);
    for j in 0..d {
        let mut diag = m[j * d + j];
        for k in 0..j {
            diag -= m[j * d + k] * m[j * d + k];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(Error::Numerical(format!(
                "matrix not positive definite (pivot {j} = {diag:e})"
            )));
        }
        let ljj = diag.sqrt();
        m[j * d + j] = ljj;
        for i in (j + 1)..d {
            let mut s = m[i * d + j];
            for k in 0..j {
                s -= m[i * d + k] * m[j * d + k];
            }
            m[i * d + j] = s / ljj;
        }
        for i in 0..j {
            m[i * d + j] = 0.0;
        }
    }
    Ok(())
}

/// Solves `L L^T x = b` in place given the lower factor `l`.
pub fn cholesky_solve_in_place(l: &[f64], d: usize, b: &mut [f64]) {
    for i in 0..d {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * d + k] * b[k];
        }
        b[i] = s / l[i * d + i];
    }
    for i in (0..d).rev() {
        let mut s = b[i];
        for k in (i + 1)..d {
            s -= l[k * d + i] * b[k];
        }
        b[i] = s / l[i * d + i];
    }
}

/// Writes `M^{-1}` into `out` column by column using the factor of `M`.
pub fn cholesky_inverse(l: &[f64], d: usize, col: &mut [f64], out: &mut [f64]) {
    for j in 0..d {
        col.iter_mut().for_each(|c| *c = 0.0);
        col[j] = 1.0;
        cholesky_solve_in_place(l, d, col);
        for i in 0..d {
            out[i * d + j] = col[i];
        }
    }
}

/// `out = L z` for lower-triangular `l`.
pub fn lower_mul(l: &[f64], d: usize, z: &[f64], out: &mut [f64]) {
    for i in 0..d {
        let mut s = 0.0;
        for k in 0..=i {
            s += l[i * d + k] * z[k];
        }
        out[i] = s;
    }
}

/// `out = A z` for a general row-major `rows x cols` matrix.
pub fn mat_vec(a: &[f64], rows: usize, cols: usize, z: &[f64], out: &mut [f64]) {
    for i in 0..rows {
        out[i] = (0..cols).map(|k| a[i * cols + k] * z[k]).sum();
    }
}
