//! Wiener norms, Laurent sections of symbols and Sobolev-type diagnostics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{diagonal_sups, BandedMatrix, DenseMatrix, IndexMetric};

/// `sum_d sup_{i-j=d} |a_ij|` over all diagonals of a dense matrix.
pub fn wiener_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(diagonal_sups(a)?.iter().sum())
}

/// Wiener norm of a banded matrix; only the stored diagonals contribute.
pub fn wiener_norm_banded(a: &BandedMatrix) -> f64 {
    a.diagonals()
        .map(|(_, d)| d.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
        .sum()
}

/// Shell suprema of `|a_ij|` keyed by integer shell `r = ceil(rho(i, j))`.
pub fn metric_shell_sups(a: &DenseMatrix, rho: &IndexMetric) -> Result<BTreeMap<u64, f64>> {
    let n = a.size()?;
    if rho.len() != n {
        return Err(Error::MetricMismatch {
            metric: rho.len(),
            matrix: n,
        });
    }
    let mut shells = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let v = a.get(i, j).abs();
            let slot = shells.entry(IndexMetric::shell(rho.distance(i, j))).or_insert(0.0f64);
            *slot = slot.max(v);
        }
    }
    Ok(shells)
}

/// Generalized Wiener norm: sum over integer shells `(r-1, r]` of the
/// largest entry magnitude whose index distance falls in the shell.
pub fn generalized_wiener_norm(a: &DenseMatrix, rho: &IndexMetric) -> Result<f64> {
    Ok(metric_shell_sups(a, rho)?.values().sum())
}

/// Finitely supported Fourier coefficients `f_k` of a symbol on the unit
/// circle, sorted by offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSeries {
    coeffs: Vec<(i128, f64)>,
}

impl SymbolSeries {
    /// Exact zeros are dropped; repeated offsets are rejected.
    pub fn new(coeffs: impl IntoIterator<Item = (i128, f64)>) -> Result<Self> {
        let mut coeffs: Vec<(i128, f64)> = coeffs.into_iter().collect();
        if coeffs.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        coeffs.sort_by_key(|&(k, _)| k);
        if let Some(w) = coeffs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput(format!(
                "offset {} appears more than once",
                w[0].0
            )));
        }
        coeffs.retain(|&(_, v)| v != 0.0);
        Ok(Self { coeffs })
    }

    pub fn coefficient(&self, k: i128) -> f64 {
        self.coeffs
            .binary_search_by_key(&k, |&(o, _)| o)
            .map(|idx| self.coeffs[idx].1)
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i128, f64)> + '_ {
        self.coeffs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|k|` in the support (0 for an empty series).
    pub fn max_offset(&self) -> u128 {
        self.coeffs
            .iter()
            .map(|(k, _)| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs
            .iter()
            .all(|&(k, v)| self.coefficient(-k) == v)
    }

    /// `f(e^{ix}) = sum_k f_k e^{ikx}`; real part only (exact for symmetric
    /// symbols).
    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|&(k, v)| v * ((k as f64) * x).cos())
            .sum()
    }
}

/// Finite Laurent (Toeplitz) section `(f_{i-j})_{i,j=0}^{n-1}`.
pub fn laurent_matrix(f: &SymbolSeries, n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("section size must be positive".into()));
    }
    let mut by_diag = vec![0.0; 2 * n - 1];
    for (k, v) in f.iter() {
        if k.unsigned_abs() < n as u128 {
            by_diag[(k + n as i128 - 1) as usize] = v;
        }
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        by_diag[i + n - 1 - j]
    }))
}

/// Banded Laurent section, with half-bandwidth the support width (capped at
/// `n - 1`).
pub fn laurent_banded(f: &SymbolSeries, n: usize) -> Result<BandedMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("section size must be positive".into()));
    }
    let k = f.max_offset().min(n as u128 - 1) as usize;
    let values: Vec<f64> = (-(k as i128)..=k as i128)
        .map(|d| f.coefficient(d))
        .collect();
    BandedMatrix::toeplitz(n, &values)
}

/// `sum_k |f_k|`.
pub fn symbol_wiener_norm(f: &SymbolSeries) -> f64 {
    // smallest magnitudes first
    let mut mags: Vec<f64> = f.iter().map(|(_, v)| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    mags.iter().sum()
}

/// `sum_{|k| <= cutoff} |k| f_k^2`.
pub fn sobolev_half_partial(f: &SymbolSeries, cutoff: u128) -> f64 {
    let mut terms: Vec<f64> = f
        .iter()
        .filter(|(k, _)| k.unsigned_abs() <= cutoff)
        .map(|(k, v)| (k.unsigned_abs() as f64) * v * v)
        .collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// Symbol with `b_0 = shift` and `b_{+-m^4} = 1/m^2` for `m = 1..=m_max`:
/// a continuous, strictly positive symbol (for `shift = 4`) whose Fourier
/// coefficients are absolutely summable but fail `sum |k| b_k^2 < inf`.
pub fn example53_symbol(m_max: u64, shift: f64) -> Result<SymbolSeries> {
    if m_max == 0 {
        return Err(Error::InvalidInput("m_max must be at least 1".into()));
    }
    let m4 = |m: u64| -> Option<i128> {
        let m = m as i128;
        m.checked_mul(m)?.checked_mul(m)?.checked_mul(m)
    };
    if m4(m_max).is_none() {
        return Err(Error::SymbolOverflow { m_max });
    }
    let mut coeffs = Vec::with_capacity(2 * m_max as usize + 1);
    coeffs.push((0, shift));
    for m in 1..=m_max {
        let k = m4(m).expect("checked above");
        let v = 1.0 / ((m as f64) * (m as f64));
        coeffs.push((k, v));
        coeffs.push((-k, v));
    }
    SymbolSeries::new(coeffs)
}

/// Range enclosure `f_0 +- sum_{k != 0} |f_k|` for a real symmetric symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn symbol_range_bounds(f: &SymbolSeries) -> RangeBounds {
    let f0 = f.coefficient(0);
    let rest: f64 = symbol_wiener_norm(f) - f0.abs();
    RangeBounds {
        lower: f0 - rest,
        upper: f0 + rest,
    }
}

/// `r_n = (kappa^2 / M) ((kappa^2 - 1)/(kappa^2 + 1))^{n+1}`, the
/// general-path bound on `dist(A^{-1}, BO_{3nk})`.
pub fn diagonal_decay_bound(m_lo: f64, m_hi: f64, n: usize) -> f64 {
    let kappa2 = (m_hi / m_lo).powi(2);
    (kappa2 / m_hi) * ((kappa2 - 1.0) / (kappa2 + 1.0)).powi(n as i32 + 1)
}

/// Envelope for diagonal `j != 0` of `A^{-1}` when `A` is in `BO_k`:
/// `d_j <= r_{ceil(|j| / 3k) - 1}`. Returns `None` for `j = 0` or `k = 0`.
pub fn inverse_diagonal_envelope(m_lo: f64, m_hi: f64, k: usize, j: i64) -> Option<f64> {
    if j == 0 || k == 0 {
        return None;
    }
    let group = (j.unsigned_abs() as usize).div_ceil(3 * k) - 1;
    Some(diagonal_decay_bound(m_lo, m_hi, group))
}

/// Upper bound on the Wiener norm of `A^{-1}` from the diagonal envelope:
/// `1/m + 6k sum_n r_n` (geometric series summed in closed form).
pub fn inverse_wiener_bound(m_lo: f64, m_hi: f64, k: usize) -> f64 {
    let kappa2 = (m_hi / m_lo).powi(2);
    let q = (kappa2 - 1.0) / (kappa2 + 1.0);
    let r0 = diagonal_decay_bound(m_lo, m_hi, 0);
    1.0 / m_lo + 6.0 * k as f64 * r0 / (1.0 - q)
}
