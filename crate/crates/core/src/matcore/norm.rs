use super::DenseMatrix;
use crate::error::{Error, Result};

/// Largest dimension handled by a dense SVD; bigger inputs use power
/// iteration on `A^T A`.
pub const DENSE_SVD_LIMIT: usize = 2000;

const POWER_TOL: f64 = 1e-12;

/// Operator 2-norm, the largest singular value.
pub fn op_norm(a: &DenseMatrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("op_norm of a non-finite matrix".into()));
    }
    if a.rows().max(a.cols()) <= DENSE_SVD_LIMIT {
        Ok(svd_norm(a))
    } else {
        power_norm(a)
    }
}

pub(crate) fn svd_norm(a: &DenseMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    a.to_nalgebra()
        .singular_values()
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
}

/// Power iteration on `A^T A` with a deterministic start vector. Converges
/// when successive Rayleigh quotients agree to 1e-12 relative, or after
/// `10 * n` sweeps.
pub fn power_norm(a: &DenseMatrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("op_norm of a non-finite matrix".into()));
    }
    let n = a.cols();
    let at = a.transpose();
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
        .collect();
    normalize(&mut x);
    let mut lambda = 0.0f64;
    for _ in 0..(10 * n).max(100) {
        let y = at.mul_vec(&a.mul_vec(&x)?)?;
        let next = dot(&x, &y);
        let norm_y = dot(&y, &y).sqrt();
        if norm_y == 0.0 {
            return Ok(0.0);
        }
        x = y.into_iter().map(|v| v / norm_y).collect();
        if (next - lambda).abs() <= POWER_TOL * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    Ok(lambda.max(0.0).sqrt())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let s = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= s);
}
