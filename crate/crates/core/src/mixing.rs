//! Beta-mixing and regularity diagnostics for Gaussian covariance matrices.
//!
//! For a zero-mean Gaussian sequence with covariance `S = (s_ij)`, beta
//! mixing is governed by the double tails `sum_{i <= t} sum_{j >= t + p} s_ij^2`.
//! On a finite section the supremum over cut positions `t` becomes a
//! maximum, which is what [`beta_criterion_profile`] reports.
//!
//! The Hellinger affinity between the joint law of a past block and a
//! future block and the product of their marginals has a closed form in the
//! eigenvalues `l_j` of the whitened cross product:
//! `A = prod_j (1 - l_j)^{1/4} / (1 - l_j / 4)^{1/2}`, squeezed between
//! `(1 - t)^{1/4}` and `exp(-t / 8)` where `t = sum_j l_j`.

use nalgebra::{Cholesky, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invapprox::dense_inverse;
use crate::matcore::{band_distance_bounds, DenseMatrix};
use crate::spectral::{spd_bounds, DEFAULT_SLACK, SYMMETRY_TOL};

/// Cross eigenvalues above this are treated as a singular joint covariance.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Cross eigenvalues are clamped to `[0, 1 - LAMBDA_CEIL_GAP]`.
pub const LAMBDA_CEIL_GAP: f64 = 1e-12;
/// Threshold used by the decay verdict.
pub const DECAY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub p: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// `b(p)` never increases with `p`.
    pub monotone: bool,
    /// `b` falls over the profile (or is identically zero).
    pub decays: bool,
    pub first: f64,
    pub last: f64,
    /// First `p` with `b(p) < DECAY_THRESHOLD`.
    pub first_p_below_threshold: Option<usize>,
}

impl Verdict {
    pub fn of(profile: &[ProfilePoint]) -> Self {
        let first = profile.first().map_or(0.0, |pt| pt.value);
        let last = profile.last().map_or(0.0, |pt| pt.value);
        let monotone = profile.windows(2).all(|w| w[1].value <= w[0].value);
        Self {
            monotone,
            decays: monotone && (first == 0.0 || last < first),
            first,
            last,
            first_p_below_threshold: profile
                .iter()
                .find(|pt| pt.value < DECAY_THRESHOLD)
                .map(|pt| pt.p),
        }
    }
}

/// Index windows: past block `m..=n`, future block `n+p+1 ..= n+p+k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub k: usize,
}

impl Window {
    pub fn past(&self) -> std::ops::RangeInclusive<usize> {
        self.m..=self.n
    }

    pub fn future_start(&self) -> usize {
        self.n + self.p + 1
    }

    fn check(&self, size: usize) -> Result<()> {
        if self.m > self.n {
            return Err(Error::InvalidWindow(format!(
                "past block {}..={} is empty",
                self.m, self.n
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidWindow("future block is empty (k = 0)".into()));
        }
        let end = self.future_start() + self.k;
        if end > size {
            return Err(Error::InvalidWindow(format!(
                "future block ends at index {} but the matrix has size {size}",
                end - 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HellingerRecord {
    pub window: Window,
    pub block_trace: f64,
    pub hellinger: HellingerAffinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub size: usize,
    pub profile: Vec<ProfilePoint>,
    pub gamma: Option<Vec<ProfilePoint>>,
    pub hellinger: Vec<HellingerRecord>,
    pub verdict: Verdict,
}

/// `b(p) = max_{0 <= t < n-p} sum_{i <= t} sum_{j >= t+p} s_ij^2` for
/// `p = 1..=p_max`.
pub fn beta_criterion_profile(sigma: &DenseMatrix, p_max: usize) -> Result<MixingReport> {
    let n = sigma.size()?;
    sigma.check_symmetric(SYMMETRY_TOL)?;
    if p_max >= n {
        return Err(Error::InvalidInput(format!(
            "p_max = {p_max} must be below the matrix size {n}"
        )));
    }
    let tails = double_tails(sigma);
    let profile: Vec<ProfilePoint> = (1..=p_max)
        .into_par_iter()
        .map(|p| ProfilePoint {
            p,
            value: (0..n - p).map(|t| tails[t * n + t + p]).fold(0.0, f64::max),
        })
        .collect();
    let verdict = Verdict::of(&profile);
    Ok(MixingReport {
        size: n,
        profile,
        gamma: None,
        hellinger: Vec::new(),
        verdict,
    })
}

/// Row-major table `G[t][s] = sum_{i <= t} sum_{j >= s} s_ij^2`.
fn double_tails(sigma: &DenseMatrix) -> Vec<f64> {
    let n = sigma.rows();
    let mut g = vec![0.0; n * n];
    let mut row_tail = vec![0.0; n];
    for t in 0..n {
        let mut acc = 0.0;
        for s in (0..n).rev() {
            acc += sigma.get(t, s).powi(2);
            row_tail[s] = acc;
        }
        for s in 0..n {
            let above = if t == 0 { 0.0 } else { g[(t - 1) * n + s] };
            g[t * n + s] = above + row_tail[s];
        }
    }
    g
}

/// `gamma(p) = sum_i sum_{j >= p + i} s_ij^2`.
pub fn gamma_sufficient(sigma: &DenseMatrix, p: usize) -> Result<f64> {
    let n = sigma.size()?;
    sigma.check_symmetric(SYMMETRY_TOL)?;
    if p >= n {
        return Err(Error::InvalidInput(format!(
            "p = {p} must be below the matrix size {n}"
        )));
    }
    Ok((0..n)
        .map(|i| ((i + p).min(n)..n).map(|j| sigma.get(i, j).powi(2)).sum::<f64>())
        .sum())
}

/// Cross-block trace computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockTrace {
    /// `sum_{i in past} sum_{j in future} s_ij^2`.
    pub entry_sum: f64,
    /// `trace(S_12 S_21)`.
    pub trace_product: f64,
}

pub fn block_trace(sigma: &DenseMatrix, w: Window) -> Result<BlockTrace> {
    let size = sigma.size()?;
    w.check(size)?;
    let q = w.n - w.m + 1;
    let f0 = w.future_start();
    let mut entry_sum = 0.0;
    for i in w.past() {
        for j in f0..f0 + w.k {
            entry_sum += sigma.get(i, j).powi(2);
        }
    }
    let s12 = sigma.block(w.m, f0, q, w.k)?;
    let s21 = sigma.block(f0, w.m, w.k, q)?;
    let prod = s12.matmul(&s21)?;
    let trace_product = (0..q).map(|i| prod.get(i, i)).sum();
    Ok(BlockTrace {
        entry_sum,
        trace_product,
    })
}

/// Covariance of a (past, future) pair, blocked out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovBlocks {
    pub sigma11: DenseMatrix,
    pub sigma22: DenseMatrix,
    pub sigma12: DenseMatrix,
}

impl CovBlocks {
    pub fn new(sigma11: DenseMatrix, sigma22: DenseMatrix, sigma12: DenseMatrix) -> Result<Self> {
        let q = sigma11.size()?;
        let k = sigma22.size()?;
        if sigma12.rows() != q || sigma12.cols() != k {
            return Err(Error::ShapeMismatch {
                op: "cov blocks",
                left: (q, k),
                right: (sigma12.rows(), sigma12.cols()),
            });
        }
        sigma11.check_symmetric(SYMMETRY_TOL)?;
        sigma22.check_symmetric(SYMMETRY_TOL)?;
        Ok(Self {
            sigma11,
            sigma22,
            sigma12,
        })
    }

    /// Extracts the blocks of `window` from a joint covariance.
    pub fn from_joint(sigma: &DenseMatrix, w: Window) -> Result<Self> {
        let size = sigma.size()?;
        w.check(size)?;
        sigma.check_symmetric(SYMMETRY_TOL)?;
        let q = w.n - w.m + 1;
        let f0 = w.future_start();
        Self::new(
            sigma.block(w.m, w.m, q, q)?,
            sigma.block(f0, f0, w.k, w.k)?,
            sigma.block(w.m, f0, q, w.k)?,
        )
    }

    pub fn sigma21(&self) -> DenseMatrix {
        self.sigma12.transpose()
    }

    pub fn past_dim(&self) -> usize {
        self.sigma11.rows()
    }

    pub fn future_dim(&self) -> usize {
        self.sigma22.rows()
    }

    /// The assembled `(q + k) x (q + k)` joint covariance.
    pub fn joint(&self) -> DenseMatrix {
        let (q, k) = (self.past_dim(), self.future_dim());
        DenseMatrix::from_fn(q + k, q + k, |i, j| match (i < q, j < q) {
            (true, true) => self.sigma11.get(i, j),
            (false, false) => self.sigma22.get(i - q, j - q),
            (true, false) => self.sigma12.get(i, j - q),
            (false, true) => self.sigma12.get(j, i - q),
        })
    }

    /// `trace(S_12 S_21)`, the squared Frobenius norm of the cross block.
    pub fn cross_trace(&self) -> f64 {
        self.sigma12.as_slice().iter().map(|v| v * v).sum()
    }
}

/// `Lambda^{-1/2} Q` with `S = Q^T Lambda Q`.
fn whitening_transform(s: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = SymmetricEigen::new(s.to_nalgebra());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    let q = eig.eigenvectors.transpose();
    let n = s.rows();
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        q[(i, j)] / eig.eigenvalues[i].sqrt()
    }))
}

/// Maps both corner blocks to the identity; the cross block becomes
/// `Lambda_1^{-1/2} Q_1 S_12 Q_2^T Lambda_2^{-1/2}`.
pub fn whiten_blocks(b: &CovBlocks) -> Result<CovBlocks> {
    let t1 = whitening_transform(&b.sigma11)?;
    let t2 = whitening_transform(&b.sigma22)?;
    let cross = t1.matmul(&b.sigma12)?.matmul(&t2.transpose())?;
    Ok(CovBlocks {
        sigma11: DenseMatrix::identity(b.past_dim()),
        sigma22: DenseMatrix::identity(b.future_dim()),
        sigma12: cross,
    })
}

/// Eigenvalues of `S_12 S_21` (computed on the smaller side), ascending,
/// without clamping.
pub fn cross_eigenvalues(b: &CovBlocks) -> Result<Vec<f64>> {
    let c = &b.sigma12;
    let gram = if b.past_dim() <= b.future_dim() {
        c.matmul(&c.transpose())?
    } else {
        c.transpose().matmul(c)?
    };
    let sym = gram
        .add(&gram.transpose())?
        .scale(0.5);
    let mut eig: Vec<f64> = SymmetricEigen::new(sym.to_nalgebra())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HellingerAffinity {
    /// `A = int sqrt(f g)`.
    pub affinity: f64,
    /// `H^2 = 2 (1 - A)`.
    pub h2: f64,
    /// `H^2 / 2`.
    pub tv_lo: f64,
    /// `min(1, sqrt(2) H^2)`.
    pub tv_hi: f64,
    /// `min(1, sqrt(2) H)`, the textbook form of the upper total-variation
    /// bound, reported alongside `tv_hi`.
    pub tv_hi_standard: f64,
    /// Trace of the whitened cross product, `sum_j l_j`.
    pub whitened_trace: f64,
    /// Clamped whitened cross eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Closed-form Hellinger affinity between the joint Gaussian of the blocks
/// and the product of its marginals.
pub fn hellinger_affinity(b: &CovBlocks) -> Result<HellingerAffinity> {
    let w = whiten_blocks(b)?;
    let mut eigenvalues = cross_eigenvalues(&w)?;
    for l in eigenvalues.iter_mut() {
        if *l > 1.0 + DEGENERACY_TOL {
            return Err(Error::DependenceDegenerate { eigenvalue: *l });
        }
        *l = l.clamp(0.0, 1.0 - LAMBDA_CEIL_GAP);
    }
    let log_a: f64 = eigenvalues
        .iter()
        .map(|&l| 0.25 * (-l).ln_1p() - 0.5 * (-l / 4.0).ln_1p())
        .sum();
    let affinity = log_a.exp();
    let h2 = 2.0 * (1.0 - affinity);
    Ok(HellingerAffinity {
        affinity,
        h2,
        tv_lo: h2 / 2.0,
        tv_hi: (std::f64::consts::SQRT_2 * h2).min(1.0),
        tv_hi_standard: (std::f64::consts::SQRT_2 * h2.sqrt()).min(1.0),
        whitened_trace: w.cross_trace(),
        eigenvalues,
    })
}

/// `((1 - t)^{1/4} or 0, exp(-t / 8))`, bracketing the affinity of blocks
/// whose whitened cross trace is `t`.
pub fn squeeze_bounds(t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("trace must be non-negative, got {t}")));
    }
    let lower = if t < 1.0 { (1.0 - t).powf(0.25) } else { 0.0 };
    Ok((lower, (-t / 8.0).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leakage {
    /// `s^T S(window)^{-1} s`, the energy of the best linear prediction of
    /// the target from the window.
    pub leakage: f64,
    /// `||S - B_p(S)||`.
    pub epsilon: f64,
    /// Upper bound on `||S^{-1}||`.
    pub inverse_norm: f64,
    /// `epsilon^2 ||S^{-1}||`.
    pub bound: f64,
}

/// Prediction energy of `X_{hi+p+1}` from `X_lo..=X_hi`, with the banded
/// approximation bound.
pub fn prediction_leakage(sigma: &DenseMatrix, lo: usize, hi: usize, p: usize) -> Result<Leakage> {
    let size = sigma.size()?;
    sigma.check_symmetric(SYMMETRY_TOL)?;
    let target = hi + p + 1;
    if lo > hi || target >= size {
        return Err(Error::InvalidWindow(format!(
            "window {lo}..={hi} with target {target} does not fit a matrix of size {size}"
        )));
    }
    let q = hi - lo + 1;
    let window = sigma.block(lo, lo, q, q)?;
    let cross: Vec<f64> = (lo..=hi).map(|i| sigma.get(i, target)).collect();
    let chol = Cholesky::new(window.to_nalgebra()).ok_or_else(|| Error::NotPositiveDefinite {
        min_eigenvalue: f64::NAN,
    })?;
    let rhs = nalgebra::DVector::from_column_slice(&cross);
    let y = chol.l().solve_lower_triangular(&rhs).ok_or(Error::Singular {
        sigma_min: 0.0,
        sigma_max: f64::NAN,
    })?;
    let leakage = y.dot(&y);
    let epsilon = band_distance_bounds(sigma, p)?.upper;
    let inverse_norm = 1.0 / spd_bounds(sigma, DEFAULT_SLACK)?.m_lo;
    Ok(Leakage {
        leakage,
        epsilon,
        inverse_norm,
        bound: epsilon * epsilon * inverse_norm,
    })
}

/// `sqrt(sum_{|i-j| >= m} s_ij^2)`.
pub fn frobenius_band_norm(sigma: &DenseMatrix, m: usize) -> Result<f64> {
    let n = sigma.size()?;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) >= m {
                acc += sigma.get(i, j).powi(2);
            }
        }
    }
    Ok(acc.sqrt())
}

/// Entrywise product restricted to `|i - j| >= m`.
pub fn schur_band_product(a: &DenseMatrix, b: &DenseMatrix, m: usize) -> Result<DenseMatrix> {
    let n = a.size()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::ShapeMismatch {
            op: "schur_band_product",
            left: (n, n),
            right: (b.rows(), b.cols()),
        });
    }
    Ok(a.map_indexed(|i, j, v| {
        if i.abs_diff(j) >= m {
            v * b.get(i, j)
        } else {
            0.0
        }
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FInversionReport {
    pub m: usize,
    pub sigma_profile: Vec<ProfilePoint>,
    pub inverse_profile: Vec<ProfilePoint>,
    pub sigma_tail: f64,
    pub inverse_tail: f64,
    pub sigma_verdict: Verdict,
    pub inverse_verdict: Verdict,
    /// The inverse's profile decays whenever the matrix's does.
    pub consistent: bool,
}

/// Criterion profiles of `S` and `S^{-1}` side by side.
pub fn f_inversion_witness(sigma: &DenseMatrix, m: usize, p_max: usize) -> Result<FInversionReport> {
    spd_bounds(sigma, DEFAULT_SLACK)?;
    let inverse = symmetrized(&dense_inverse(sigma)?)?;
    let s = beta_criterion_profile(sigma, p_max)?;
    let inv = beta_criterion_profile(&inverse, p_max)?;
    Ok(FInversionReport {
        m,
        sigma_tail: frobenius_band_norm(sigma, m)?,
        inverse_tail: frobenius_band_norm(&inverse, m)?,
        consistent: !s.verdict.decays || inv.verdict.decays,
        sigma_verdict: s.verdict,
        inverse_verdict: inv.verdict,
        sigma_profile: s.profile,
        inverse_profile: inv.profile,
    })
}

/// Block trace and Hellinger summary for one window of `sigma`.
pub fn hellinger_record(sigma: &DenseMatrix, w: Window) -> Result<HellingerRecord> {
    let trace = block_trace(sigma, w)?;
    let blocks = CovBlocks::from_joint(sigma, w)?;
    Ok(HellingerRecord {
        window: w,
        block_trace: trace.entry_sum,
        hellinger: hellinger_affinity(&blocks)?,
    })
}

/// `gamma(p)` for `p = 1..=p_max`.
pub fn gamma_profile(sigma: &DenseMatrix, p_max: usize) -> Result<Vec<ProfilePoint>> {
    (1..=p_max)
        .map(|p| gamma_sufficient(sigma, p).map(|value| ProfilePoint { p, value }))
        .collect()
}

fn symmetrized(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(a.add(&a.transpose())?.scale(0.5))
}
