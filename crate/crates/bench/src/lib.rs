//! Fixtures shared by the benchmarks.

use banded_inverse::{BandedMatrix, DenseMatrix};

/// Diagonally dominant SPD Toeplitz matrix with half-bandwidth `k`.
pub fn spd_toeplitz(n: usize, k: usize) -> BandedMatrix {
    let mut values = vec![0.0; 2 * k + 1];
    for d in 1..=k {
        let v = -0.5 / (d * d) as f64;
        values[k - d] = v;
        values[k + d] = v;
    }
    values[k] = 2.0 + k as f64;
    BandedMatrix::toeplitz(n, &values).expect("k < n")
}

/// Covariance with entries `r^{|i-j|}`.
pub fn exponential_covariance(n: usize, r: f64) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| r.powi(i.abs_diff(j) as i32))
}
