//! Dense and banded matrices, band truncation, band distance, metric
//! banding and permutation conjugation.

mod banded;
mod dense;
mod metric;
mod norm;
mod permutation;

pub use banded::BandedMatrix;
pub use dense::DenseMatrix;
pub use metric::{IndexMetric, MetricSource};
pub use norm::{op_norm, power_norm, DENSE_SVD_LIMIT};
pub use permutation::Permutation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `B_k(A)`: keeps the entries with `|i - j| <= k`.
pub fn band_truncate(a: &DenseMatrix, k: usize) -> Result<BandedMatrix> {
    let n = a.size()?;
    if k >= n {
        return Err(Error::InvalidBandwidth { k, n });
    }
    Ok(BandedMatrix::truncate(a, k))
}

/// Dense copy of `a` with the band `|i - j| <= k` zeroed, i.e. `A - B_k(A)`.
pub fn off_band(a: &DenseMatrix, k: usize) -> DenseMatrix {
    a.map_indexed(|i, j, v| if i.abs_diff(j) <= k { 0.0 } else { v })
}

/// Supremum norm of diagonal `d` (entries with `i - j = d`).
pub fn diagonal_sup(a: &DenseMatrix, d: i64) -> Result<f64> {
    let n = a.size()?;
    if d.unsigned_abs() as usize >= n {
        return Err(Error::OutOfRange { offset: d, n });
    }
    Ok(diagonal_sup_unchecked(a, d))
}

fn diagonal_sup_unchecked(a: &DenseMatrix, d: i64) -> f64 {
    let n = a.rows();
    let off = d.unsigned_abs() as usize;
    (0..n - off)
        .map(|t| {
            if d >= 0 {
                a.get(t + off, t)
            } else {
                a.get(t, t + off)
            }
        })
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// All diagonal suprema, indexed by `d + n - 1` for `d` in `-(n-1)..=n-1`.
pub fn diagonal_sups(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.size()? as i64;
    Ok((-(n - 1)..n).map(|d| diagonal_sup_unchecked(a, d)).collect())
}

/// Bracket on `dist(A, BO_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandDistance {
    /// Largest off-band entry magnitude.
    pub lower: f64,
    /// `||A - B_k(A)||`.
    pub upper: f64,
}

/// `lower = max_{|d| > k} d_d <= dist(A, BO_k) <= ||A - B_k(A)|| = upper`.
pub fn band_distance_bounds(a: &DenseMatrix, k: usize) -> Result<BandDistance> {
    let n = a.size()?;
    if k + 1 >= n {
        return Ok(BandDistance {
            lower: 0.0,
            upper: 0.0,
        });
    }
    let rest = off_band(a, k);
    let lower = rest.max_abs();
    let upper = if lower == 0.0 { 0.0 } else { op_norm(&rest)? };
    Ok(BandDistance {
        lower,
        upper: upper.max(lower),
    })
}

/// Zeroes every entry with `rho(i, j) > r`.
pub fn metric_truncate(a: &DenseMatrix, rho: &IndexMetric, r: f64) -> Result<DenseMatrix> {
    let n = a.size()?;
    rho.check_size(n)?;
    Ok(a.map_indexed(|i, j, v| if rho.distance(i, j) > r { 0.0 } else { v }))
}

/// `Pi A Pi^T` with `(Pi x)_i = x_{pi(i)}`, i.e. entry `(i, j)` is
/// `a[pi(i), pi(j)]`.
pub fn permute_conjugate(a: &DenseMatrix, pi: &Permutation) -> Result<DenseMatrix> {
    let n = a.size()?;
    if pi.len() != n {
        return Err(Error::ShapeMismatch {
            op: "permute_conjugate",
            left: (n, n),
            right: (pi.len(), pi.len()),
        });
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| a.get(pi.apply(i), pi.apply(j))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |i, j| 0.5f64.powi(i.abs_diff(j) as i32))
    }

    #[test]
    fn truncate_identity_and_geometric() {
        let i5 = DenseMatrix::identity(5);
        assert_eq!(band_truncate(&i5, 0).unwrap().to_dense(), i5);
        let b = band_truncate(&geometric(4), 1).unwrap();
        assert_eq!(b.get(0, 2), 0.0);
        assert_eq!(b.get(0, 1), 0.5);
        assert_eq!(b.get(3, 2), 0.5);
        assert!(matches!(
            band_truncate(&i5, 5),
            Err(Error::InvalidBandwidth { k: 5, n: 5 })
        ));
    }

    #[test]
    fn diagonal_sup_examples() {
        let i3 = DenseMatrix::identity(3);
        assert_eq!(diagonal_sup(&i3, 0).unwrap(), 1.0);
        assert_eq!(diagonal_sup(&i3, 1).unwrap(), 0.0);
        assert_eq!(diagonal_sup(&geometric(5), 2).unwrap(), 0.25);
        assert_eq!(diagonal_sup(&geometric(5), -2).unwrap(), 0.25);
        assert!(matches!(
            diagonal_sup(&i3, -3),
            Err(Error::OutOfRange { offset: -3, n: 3 })
        ));
    }

    #[test]
    fn distance_of_banded_is_zero() {
        let a = band_truncate(&geometric(6), 2).unwrap().to_dense();
        let d = band_distance_bounds(&a, 2).unwrap();
        assert_eq!((d.lower, d.upper), (0.0, 0.0));
    }

    #[test]
    fn distance_of_single_corner_entry() {
        let n = 6;
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            if i == j || (i == 0 && j == n - 1) {
                1.0
            } else {
                0.0
            }
        });
        let d = band_distance_bounds(&a, n - 2).unwrap();
        assert_eq!(d.lower, 1.0);
        assert!((d.upper - 1.0).abs() < 1e-14);
    }

    #[test]
    fn metric_index_matches_band() {
        let a = geometric(7);
        let m = metric_truncate(&a, &IndexMetric::index(7), 2.0).unwrap();
        assert_eq!(m, band_truncate(&a, 2).unwrap().to_dense());
        let all = metric_truncate(&a, &IndexMetric::index(7), 6.0).unwrap();
        assert_eq!(all, a);
        assert!(metric_truncate(&a, &IndexMetric::index(6), 1.0).is_err());
    }

    #[test]
    fn permuting_a_diagonal_permutes_entries() {
        let d = DenseMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let p = Permutation::new(vec![3, 1, 0, 2]).unwrap();
        let c = permute_conjugate(&d, &p).unwrap();
        assert_eq!(c, DenseMatrix::from_diagonal(&[4.0, 2.0, 1.0, 3.0]));
        assert_eq!(permute_conjugate(&d, &Permutation::identity(4)).unwrap(), d);
        assert!(permute_conjugate(&d, &Permutation::identity(3)).is_err());
    }
}
