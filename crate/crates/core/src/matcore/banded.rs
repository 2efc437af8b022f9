use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Square matrix stored by diagonals.
///
/// Diagonal `d` holds the entries with `i - j = d`, for `d` in `-k..=k`,
/// ordered from the top-left corner (position `min(i, j)`). Every entry with
/// `|i - j| > k` is exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandedMatrix {
    n: usize,
    k: usize,
    diags: Vec<Vec<f64>>,
}

impl BandedMatrix {
    /// Builds from explicit diagonals, `diags[d + k]` holding diagonal `d`.
    pub fn from_diagonals(n: usize, k: usize, diags: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix size must be positive".into()));
        }
        if k >= n {
            return Err(Error::InvalidBandwidth { k, n });
        }
        if diags.len() != 2 * k + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} diagonals for half-bandwidth {k}, got {}",
                2 * k + 1,
                diags.len()
            )));
        }
        for (idx, diag) in diags.iter().enumerate() {
            let d = idx as i64 - k as i64;
            let want = n - d.unsigned_abs() as usize;
            if diag.len() != want {
                return Err(Error::InvalidInput(format!(
                    "diagonal {d} needs {want} entries, got {}",
                    diag.len()
                )));
            }
            if diag.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { n, k, diags })
    }

    pub fn zeros(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix size must be positive".into()));
        }
        if k >= n {
            return Err(Error::InvalidBandwidth { k, n });
        }
        Ok(Self::zeros_unchecked(n, k))
    }

    fn zeros_unchecked(n: usize, k: usize) -> Self {
        let diags = (0..=2 * k)
            .map(|idx| vec![0.0; n - (idx as i64 - k as i64).unsigned_abs() as usize])
            .collect();
        Self { n, k, diags }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros_unchecked(n, 0);
        out.diags[0].fill(1.0);
        out
    }

    /// Constant-diagonal matrix with `values[d + k]` on diagonal `d`.
    pub fn toeplitz(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() % 2 == 0 {
            return Err(Error::InvalidInput(
                "toeplitz needs an odd number of diagonal values".into(),
            ));
        }
        let k = values.len() / 2;
        let diags = values
            .iter()
            .enumerate()
            .map(|(idx, &v)| vec![v; n.saturating_sub((idx as i64 - k as i64).unsigned_abs() as usize)])
            .collect();
        Self::from_diagonals(n, k, diags)
    }

    /// Exact conversion; fails if `a` has a nonzero outside the band.
    pub fn from_dense(a: &DenseMatrix, k: usize) -> Result<Self> {
        let n = a.size()?;
        if k >= n {
            return Err(Error::InvalidBandwidth { k, n });
        }
        let actual = a.bandwidth();
        if actual > k {
            return Err(Error::InvalidInput(format!(
                "matrix has a nonzero on diagonal {actual}, outside half-bandwidth {k}"
            )));
        }
        Ok(Self::truncate(a, k))
    }

    /// Conversion at the smallest half-bandwidth that holds `a` exactly.
    pub fn from_dense_tight(a: &DenseMatrix) -> Result<Self> {
        let n = a.size()?;
        Ok(Self::truncate(a, a.bandwidth().min(n - 1)))
    }

    /// Keeps the entries with `|i - j| <= k`. Caller guarantees `k < n`.
    pub(crate) fn truncate(a: &DenseMatrix, k: usize) -> Self {
        let n = a.rows();
        let mut out = Self::zeros_unchecked(n, k);
        for (idx, diag) in out.diags.iter_mut().enumerate() {
            let d = idx as i64 - k as i64;
            for (t, slot) in diag.iter_mut().enumerate() {
                let (i, j) = Self::coords(d, t);
                *slot = a.get(i, j);
            }
        }
        out
    }

    #[inline]
    fn coords(d: i64, t: usize) -> (usize, usize) {
        if d >= 0 {
            (t + d as usize, t)
        } else {
            (t, t + d.unsigned_abs() as usize)
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.k
    }

    /// Diagonal `d` (`i - j = d`), or `None` outside the stored band.
    pub fn diagonal(&self, d: i64) -> Option<&[f64]> {
        if d.unsigned_abs() as usize > self.k {
            None
        } else {
            Some(&self.diags[(d + self.k as i64) as usize])
        }
    }

    pub fn diagonals(&self) -> impl Iterator<Item = (i64, &[f64])> {
        let k = self.k as i64;
        self.diags
            .iter()
            .enumerate()
            .map(move |(idx, d)| (idx as i64 - k, d.as_slice()))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.k {
            0.0
        } else {
            let d = i as i64 - j as i64;
            self.diags[(d + self.k as i64) as usize][i.min(j)]
        }
    }

    #[inline]
    fn slot_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let d = i as i64 - j as i64;
        &mut self.diags[(d + self.k as i64) as usize][i.min(j)]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.n * self.n];
        for (d, diag) in self.diagonals() {
            for (t, &v) in diag.iter().enumerate() {
                let (i, j) = Self::coords(d, t);
                data[i * self.n + j] = v;
            }
        }
        DenseMatrix::from_raw(self.n, self.n, data)
    }

    /// Smallest half-bandwidth that holds the stored entries.
    pub fn effective_bandwidth(&self) -> usize {
        self.diagonals()
            .filter(|(_, diag)| diag.iter().any(|&v| v != 0.0))
            .map(|(d, _)| d.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Same matrix stored with half-bandwidth `k2 >= k` (capped at `n - 1`).
    pub fn widen(&self, k2: usize) -> Self {
        let k2 = k2.max(self.k).min(self.n - 1);
        let mut out = Self::zeros_unchecked(self.n, k2);
        for (d, diag) in self.diagonals() {
            out.diags[(d + k2 as i64) as usize].copy_from_slice(diag);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut diags = self.diags.clone();
        diags.reverse();
        Self {
            n: self.n,
            k: self.k,
            diags,
        }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            k: self.k,
            diags: self
                .diags
                .iter()
                .map(|d| d.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch {
                op: "banded add",
                left: (self.n, self.n),
                right: (other.n, other.n),
            });
        }
        let mut out = self.widen(other.k);
        for (d, diag) in other.diagonals() {
            let dst = &mut out.diags[(d + out.k as i64) as usize];
            for (a, b) in dst.iter_mut().zip(diag) {
                *a += b;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// `I - s * self`.
    pub fn identity_minus_scaled(&self, s: f64) -> Self {
        let mut out = self.scale(-s);
        for v in out.diags[out.k].iter_mut() {
            *v += 1.0;
        }
        out
    }

    /// Product with half-bandwidth `k1 + k2` (capped at `n - 1`).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch {
                op: "banded matmul",
                left: (self.n, self.n),
                right: (other.n, other.n),
            });
        }
        let n = self.n;
        let (ka, kb) = (self.k, other.k);
        let mut out = Self::zeros_unchecked(n, (ka + kb).min(n - 1));
        for i in 0..n {
            for l in i.saturating_sub(ka)..=(i + ka).min(n - 1) {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in l.saturating_sub(kb)..=(l + kb).min(n - 1) {
                    *out.slot_mut(i, j) += a * other.get(l, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::ShapeMismatch {
                op: "banded mul_vec",
                left: (self.n, self.n),
                right: (x.len(), 1),
            });
        }
        let n = self.n;
        Ok((0..n)
            .map(|i| {
                (i.saturating_sub(self.k)..=(i + self.k).min(n - 1))
                    .map(|j| self.get(i, j) * x[j])
                    .sum()
            })
            .collect())
    }

    pub fn is_symmetric_exact(&self) -> bool {
        (1..=self.k as i64).all(|d| self.diagonal(d) == self.diagonal(-d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, lo: f64, mid: f64, hi: f64) -> BandedMatrix {
        BandedMatrix::toeplitz(n, &[hi, mid, lo]).unwrap()
    }

    #[test]
    fn diagonal_convention_is_i_minus_j() {
        // values[0] is diagonal -1 (superdiagonal), values[2] is diagonal +1.
        let b = tridiag(4, 7.0, 2.0, 5.0);
        assert_eq!(b.get(1, 0), 7.0);
        assert_eq!(b.get(0, 1), 5.0);
        assert_eq!(b.get(0, 2), 0.0);
    }

    #[test]
    fn dense_round_trip_is_exact() {
        let a = DenseMatrix::from_fn(6, 6, |i, j| {
            if i.abs_diff(j) <= 2 {
                (i as f64 + 0.1) * (j as f64 - 0.3)
            } else {
                0.0
            }
        });
        let b = BandedMatrix::from_dense(&a, 2).unwrap();
        assert_eq!(b.to_dense(), a);
        assert!(BandedMatrix::from_dense(&a, 1).is_err());
        assert!(BandedMatrix::from_dense(&a, 6).is_err());
    }

    #[test]
    fn product_bandwidth_adds() {
        let a = tridiag(8, 1.0, 2.0, 3.0);
        let c = a.matmul(&a).unwrap();
        assert_eq!(c.half_bandwidth(), 2);
        let dense = a.to_dense().matmul(&a.to_dense()).unwrap();
        assert_eq!(c.to_dense(), dense);
        // capped at n - 1
        let small = tridiag(2, 1.0, 1.0, 1.0);
        assert_eq!(small.matmul(&small).unwrap().half_bandwidth(), 1);
    }

    #[test]
    fn add_and_transpose() {
        let a = tridiag(5, 1.0, 2.0, 3.0);
        let zero = a.add(&a.scale(-1.0)).unwrap();
        assert_eq!(zero.effective_bandwidth(), 0);
        assert!(zero.to_dense().as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
        let d = BandedMatrix::identity(5);
        let s = a.add(&d).unwrap();
        assert_eq!(s.half_bandwidth(), 1);
        assert_eq!(s.get(2, 2), 3.0);
    }

    #[test]
    fn mul_vec_matches_dense() {
        let a = tridiag(6, -1.0, 4.0, -2.0);
        let x: Vec<f64> = (0..6).map(|v| v as f64 * 0.5 - 1.0).collect();
        assert_eq!(a.mul_vec(&x).unwrap(), a.to_dense().mul_vec(&x).unwrap());
    }
}
