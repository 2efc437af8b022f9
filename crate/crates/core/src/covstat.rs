//! Sampling, empirical and banded covariance estimates, and the banded
//! Neumann estimate of the precision matrix.

use nalgebra::Cholesky;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invapprox::neumann_sum;
use crate::matcore::{band_truncate, DenseMatrix};
use crate::spectral::{symmetric_extremes, user_bounds, SpectralBounds, SYMMETRY_TOL};

/// `N` observations of a `p`-vector, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    n_samples: usize,
    dim: usize,
    data: Vec<f64>,
    seed: Option<u64>,
}

impl SampleSet {
    pub fn new(n_samples: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != n_samples * dim {
            return Err(Error::InvalidInput(format!(
                "expected {n_samples} x {dim} observations, got {} values",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n_samples,
            dim,
            data,
            seed: None,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn observation(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Rows `start..end` as a new set.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            n_samples: end - start,
            dim: self.dim,
            data: self.data[start * self.dim..end * self.dim].to_vec(),
            seed: self.seed,
        }
    }

    /// All rows outside `start..end`.
    pub fn without(&self, start: usize, end: usize) -> Self {
        let mut data = Vec::with_capacity((self.n_samples - (end - start)) * self.dim);
        data.extend_from_slice(&self.data[..start * self.dim]);
        data.extend_from_slice(&self.data[end * self.dim..]);
        Self {
            n_samples: self.n_samples - (end - start),
            dim: self.dim,
            data,
            seed: self.seed,
        }
    }
}

/// Lower Cholesky factor, retrying once with a `1e-10 * trace / p` jitter.
fn cholesky_with_jitter(sigma: &DenseMatrix) -> Result<nalgebra::DMatrix<f64>> {
    let p = sigma.size()?;
    sigma.check_symmetric(SYMMETRY_TOL)?;
    let m = sigma.to_nalgebra();
    if let Some(c) = Cholesky::new(m.clone()) {
        return Ok(c.l());
    }
    let trace: f64 = (0..p).map(|i| sigma.get(i, i)).sum();
    let jitter = 1e-10 * trace / p as f64;
    let shifted = m + nalgebra::DMatrix::identity(p, p) * jitter;
    Cholesky::new(shifted).map(|c| c.l()).ok_or_else(|| {
        let (lo, _) = symmetric_extremes(sigma).unwrap_or((f64::NAN, f64::NAN));
        Error::NotPositiveDefinite { min_eigenvalue: lo }
    })
}

/// `N` draws from `N(0, sigma)` as `L z` with `sigma = L L^T`; a pure
/// function of `(sigma, N, seed)`.
pub fn sample_gaussian(sigma: &DenseMatrix, n_samples: usize, seed: u64) -> Result<SampleSet> {
    let l = cholesky_with_jitter(sigma)?;
    let p = l.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n_samples * p);
    let mut z = vec![0.0; p];
    for _ in 0..n_samples {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        for i in 0..p {
            data.push((0..=i).map(|j| l[(i, j)] * z[j]).sum());
        }
    }
    Ok(SampleSet {
        n_samples,
        dim: p,
        data,
        seed: Some(seed),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    Empirical,
    Banded,
    BandedInverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub sigma_hat: DenseMatrix,
    pub kind: EstimateKind,
    pub k: Option<usize>,
    pub terms: Option<usize>,
    pub gamma_hat: Option<f64>,
    /// `(m_hat, M_hat)`, extreme eigenvalues of `B_k(sigma_hat)`.
    pub eigen_extremes: Option<(f64, f64)>,
}

impl CovarianceEstimate {
    /// Wraps a known covariance as if it were the empirical estimate.
    pub fn from_matrix(sigma: DenseMatrix) -> Result<Self> {
        sigma.size()?;
        sigma.check_symmetric(SYMMETRY_TOL)?;
        Ok(Self {
            sigma_hat: sigma,
            kind: EstimateKind::Empirical,
            k: None,
            terms: None,
            gamma_hat: None,
            eigen_extremes: None,
        })
    }
}

/// `(1/N) sum_i (x_i - xbar)(x_i - xbar)^T`.
pub fn empirical_cov(data: &SampleSet) -> Result<CovarianceEstimate> {
    let (n, p) = (data.n_samples(), data.dim());
    if n < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            actual: n,
        });
    }
    let mut mean = vec![0.0; p];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(data.observation(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut acc = vec![0.0; p * p];
    let mut centered = vec![0.0; p];
    for i in 0..n {
        for ((c, x), m) in centered.iter_mut().zip(data.observation(i)).zip(&mean) {
            *c = x - m;
        }
        for a in 0..p {
            let ca = centered[a];
            for b in a..p {
                acc[a * p + b] += ca * centered[b];
            }
        }
    }
    let sigma = DenseMatrix::from_fn(p, p, |a, b| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        acc[lo * p + hi] / n as f64
    });
    Ok(CovarianceEstimate {
        sigma_hat: sigma,
        kind: EstimateKind::Empirical,
        k: None,
        terms: None,
        gamma_hat: None,
        eigen_extremes: None,
    })
}

fn require_empirical(est: &CovarianceEstimate) -> Result<()> {
    if est.kind != EstimateKind::Empirical {
        return Err(Error::InvalidInput(format!(
            "expected an empirical covariance, got {:?}",
            est.kind
        )));
    }
    Ok(())
}

/// `B_k(sigma_hat)`.
pub fn banded_cov_estimator(est: &CovarianceEstimate, k: usize) -> Result<CovarianceEstimate> {
    require_empirical(est)?;
    let banded = band_truncate(&est.sigma_hat, k)?;
    Ok(CovarianceEstimate {
        sigma_hat: banded.to_dense(),
        kind: EstimateKind::Banded,
        k: Some(k),
        terms: None,
        gamma_hat: None,
        eigen_extremes: None,
    })
}

/// `g sum_{j=0}^n (I - g B_k(sigma_hat))^j` with `g = 2 / (M_hat + m_hat)`,
/// the extreme eigenvalues of `B_k(sigma_hat)`. The result is symmetric
/// with half-bandwidth at most `n k`.
pub fn banded_precision_estimator(
    est: &CovarianceEstimate,
    k: usize,
    terms: usize,
) -> Result<CovarianceEstimate> {
    require_empirical(est)?;
    let banded = band_truncate(&est.sigma_hat, k)?;
    let (lo, hi) = symmetric_extremes(&banded.to_dense())?;
    if lo <= 0.0 {
        return Err(Error::BandedEstimateIndefinite { min_eigenvalue: lo });
    }
    let bounds = user_bounds(lo, hi)?;
    let gamma = 2.0 / (bounds.m_hi + bounds.m_lo);
    let approx = neumann_sum(&banded, gamma, terms)?.scale(gamma);
    Ok(CovarianceEstimate {
        sigma_hat: approx.to_dense(),
        kind: EstimateKind::BandedInverse,
        k: Some(k),
        terms: Some(terms),
        gamma_hat: Some(gamma),
        eigen_extremes: Some((lo, hi)),
    })
}

/// `2 delta_k / (m (m - 2 delta_k)) + (1/m) ((kappa - 1)/(kappa + 1))^n`.
pub fn precision_bound_eq26(bounds: &SpectralBounds, delta_k: f64, terms: usize) -> Result<f64> {
    let m = bounds.m_lo;
    if !(delta_k >= 0.0) || delta_k >= m / 2.0 {
        return Err(Error::InadmissibleTruncation {
            delta_k,
            half_m: m / 2.0,
        });
    }
    let q = (bounds.m_hi - m) / (bounds.m_hi + m);
    let geometric = (1.0 / m) * q.powi(i32::try_from(terms).unwrap_or(i32::MAX));
    Ok(2.0 * delta_k / (m * (m - 2.0 * delta_k)) + geometric)
}

/// Per-`k` cross-validation risk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvRisk {
    pub k: usize,
    pub risk: f64,
}

/// Fold-averaged `||B_k(S_train) - S_test||_F` for every `k` in the grid,
/// in ascending `k`. Folds are contiguous blocks of observations.
pub fn cv_risks(data: &SampleSet, k_grid: &[usize], folds: usize) -> Result<Vec<CvRisk>> {
    if k_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if folds < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {folds}")));
    }
    let n = data.n_samples();
    if n < 2 * folds {
        return Err(Error::InsufficientSamples {
            required: 2 * folds,
            actual: n,
        });
    }
    let p = data.dim();
    let mut grid: Vec<usize> = k_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if let Some(&k) = grid.iter().find(|&&k| k >= p) {
        return Err(Error::InvalidBandwidth { k, n: p });
    }
    let mut totals = vec![0.0; grid.len()];
    for f in 0..folds {
        let (start, end) = (f * n / folds, (f + 1) * n / folds);
        let test = empirical_cov(&data.slice(start, end))?.sigma_hat;
        let train = empirical_cov(&data.without(start, end))?.sigma_hat;
        for (total, &k) in totals.iter_mut().zip(&grid) {
            let banded = band_truncate(&train, k)?.to_dense();
            *total += banded.sub(&test)?.frobenius_norm();
        }
    }
    Ok(grid
        .into_iter()
        .zip(totals)
        .map(|(k, t)| CvRisk {
            k,
            risk: t / folds as f64,
        })
        .collect())
}

/// The risk-minimizing `k`; ties go to the smaller `k`.
pub fn select_k(data: &SampleSet, k_grid: &[usize], folds: usize) -> Result<usize> {
    let risks = cv_risks(data, k_grid, folds)?;
    let mut best = risks[0];
    for r in &risks[1..] {
        if r.risk < best.risk {
            best = *r;
        }
    }
    Ok(best.k)
}
