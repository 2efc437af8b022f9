//! Banded approximate inverses with closed-form error certificates.
//!
//! Three constructions are provided:
//!
//! * [`neumann_spd`]: for a symmetric positive definite `A` in `BO_k`, the
//!   scaled Neumann sum `B_n = g * sum_{j=0}^n (I - g A)^j` with
//!   `g = 2 / (M + m)` lies in `BO_{nk}` and satisfies
//!   `||A^{-1} - B_n|| <= (1/m) ((kappa - 1)/(kappa + 1))^{n+1}`.
//! * [`neumann_general`]: for an invertible `A` in `BO_k`, the same sum is
//!   applied to `A^T A` and multiplied by `A^T`, giving an approximant in
//!   `BO_{3nk}` with error at most
//!   `(kappa^2 / M) ((kappa^2 - 1)/(kappa^2 + 1))^{n+1}`.
//! * [`bdo_inverse`]: for a dense (band-dominated) `A`, the hard truncation
//!   `A_k = B_k(A)` is inverted with [`neumann_general`] and the truncation
//!   error `eps_k = ||A - A_k||` is carried through the bound.
//!
//! All bounds are evaluated with conservative spectral bounds
//! `m_lo <= m`, `M_hi >= M`.

use nalgebra::LU;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{band_distance_bounds, band_truncate, op_norm, BandedMatrix, DenseMatrix};
use crate::spectral::{
    singular_bounds, singular_bounds_banded, spd_bounds_banded, BoundsSource, SpectralBounds,
    DEFAULT_SLACK, SYMMETRY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Spd,
    General,
    Bdo,
}

/// How much the error bound can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rigor {
    /// Spectral bounds were supplied by the caller.
    Rigorous,
    /// Spectral bounds came from a floating-point solve widened by a slack.
    FloatingPointConservative,
}

/// Quantities specific to the band-dominated construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdoDetails {
    pub k: usize,
    /// Measured `||A - B_k(A)||`.
    pub epsilon_k: f64,
    /// `m_lo / (m_lo - epsilon_k)`.
    pub alpha_k: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    /// Bound on `||A^{-1} - A_k^{-1}||`.
    pub truncation_term: f64,
    /// Bound on `||A_k^{-1} - approx||`.
    pub series_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseCertificate {
    pub construction: Construction,
    pub approx: BandedMatrix,
    /// Half-bandwidth the construction certifies (`n k` or `3 n k`).
    pub band_width: usize,
    pub terms: usize,
    pub gamma: f64,
    pub bounds_used: SpectralBounds,
    pub error_bound: f64,
    pub rigor: Rigor,
    pub bdo: Option<BdoDetails>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesMode {
    Spd,
    General,
}

/// `(1/m) ((M - m)/(M + m))^{n+1}`.
pub fn spd_error_bound(bounds: &SpectralBounds, terms: usize) -> f64 {
    let (m, big) = (bounds.m_lo, bounds.m_hi);
    (1.0 / m) * ((big - m) / (big + m)).powi(exponent(terms))
}

/// `(M / m^2) ((M^2 - m^2)/(M^2 + m^2))^{n+1}`.
pub fn general_error_bound(bounds: &SpectralBounds, terms: usize) -> f64 {
    series_term(bounds.m_hi, bounds.m_hi, bounds.m_lo, terms)
}

/// `(upper / low^2) ((upper^2 - low^2)/(lower^2 + low^2))^{n+1}`; with
/// `upper = lower = M` this is the general-path bound.
fn series_term(upper: f64, lower: f64, low: f64, terms: usize) -> f64 {
    let (u2, l2, w2) = (upper * upper, lower * lower, low * low);
    (upper / w2) * ((u2 - w2) / (l2 + w2)).powi(exponent(terms))
}

fn exponent(terms: usize) -> i32 {
    i32::try_from(terms + 1).unwrap_or(i32::MAX)
}

fn rigor_of(bounds: &SpectralBounds) -> Rigor {
    match bounds.source {
        BoundsSource::UserSupplied => Rigor::Rigorous,
        BoundsSource::Estimated => Rigor::FloatingPointConservative,
    }
}

/// `sum_{j=0}^{terms} (I - g A)^j`, accumulated by Horner's rule.
pub(crate) fn neumann_sum(a: &BandedMatrix, gamma: f64, terms: usize) -> Result<BandedMatrix> {
    let r = a.identity_minus_scaled(gamma);
    let id = BandedMatrix::identity(a.size());
    let mut s = id.clone();
    for _ in 0..terms {
        s = id.add(&r.matmul(&s)?)?;
    }
    Ok(s)
}

/// Column 2-norms, each a lower bound on `sigma_max` and an upper bound on
/// `sigma_min`.
fn column_norm_range(a: &BandedMatrix) -> (f64, f64) {
    let n = a.size();
    let k = a.half_bandwidth();
    let norms = (0..n).map(|j| {
        (j.saturating_sub(k)..=(j + k).min(n - 1))
            .map(|i| a.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt()
    });
    norms.fold((f64::INFINITY, 0.0f64), |(lo, hi), c| (lo.min(c), hi.max(c)))
}

fn check_consistent(a: &BandedMatrix, bounds: &SpectralBounds, spd: bool) -> Result<()> {
    let slack = 1e-12;
    let (col_lo, col_hi) = column_norm_range(a);
    if bounds.m_hi < col_hi * (1.0 - slack) {
        return Err(Error::CertificateRefused(format!(
            "M_hi = {} is below a column norm {} of A",
            bounds.m_hi, col_hi
        )));
    }
    let lower_cap = if spd {
        (0..a.size()).map(|i| a.get(i, i)).fold(f64::INFINITY, f64::min)
    } else {
        col_lo
    };
    if bounds.m_lo > lower_cap * (1.0 + slack) {
        return Err(Error::CertificateRefused(format!(
            "m_lo = {} exceeds an upper estimate {} of the smallest {}",
            bounds.m_lo,
            lower_cap,
            if spd { "eigenvalue" } else { "singular value" }
        )));
    }
    Ok(())
}

/// Neumann-series inverse of a symmetric positive definite banded matrix.
///
/// Without `bounds`, they are estimated with [`spd_bounds_banded`]; supplied
/// bounds are checked against cheap estimates of `||A||` and `lambda_min`.
pub fn neumann_spd(
    a: &BandedMatrix,
    terms: usize,
    bounds: Option<SpectralBounds>,
) -> Result<InverseCertificate> {
    let bounds = match bounds {
        None => spd_bounds_banded(a, DEFAULT_SLACK)?,
        Some(b) => {
            a.to_dense().check_symmetric(SYMMETRY_TOL)?;
            check_consistent(a, &b, true)?;
            b
        }
    };
    let gamma = 2.0 / (bounds.m_hi + bounds.m_lo);
    let approx = neumann_sum(a, gamma, terms)?.scale(gamma);
    Ok(InverseCertificate {
        construction: Construction::Spd,
        approx,
        band_width: terms * a.half_bandwidth(),
        terms,
        gamma,
        bounds_used: bounds,
        error_bound: spd_error_bound(&bounds, terms),
        rigor: rigor_of(&bounds),
        bdo: None,
    })
}

/// `g_B * sum_{j=0}^n (I - g_B A^T A)^j * A^T` with `g_B = 2 / (M^2 + m^2)`.
fn general_approx(a: &BandedMatrix, terms: usize, bounds: &SpectralBounds) -> Result<(f64, BandedMatrix)> {
    let at = a.transpose();
    let b = at.matmul(a)?;
    let gamma = 2.0 / (bounds.m_hi * bounds.m_hi + bounds.m_lo * bounds.m_lo);
    let approx = neumann_sum(&b, gamma, terms)?.matmul(&at)?.scale(gamma);
    Ok((gamma, approx))
}

/// The general path certifies `3 n k`; at `n = 0` the approximant
/// `g_B A^T` still occupies `k` diagonals.
fn general_band_width(terms: usize, k: usize) -> usize {
    if terms == 0 {
        k
    } else {
        3 * terms * k
    }
}

/// Neumann-series inverse of an invertible (not necessarily symmetric)
/// banded matrix, via the normal equations.
pub fn neumann_general(
    a: &BandedMatrix,
    terms: usize,
    bounds: Option<SpectralBounds>,
) -> Result<InverseCertificate> {
    let bounds = match bounds {
        None => singular_bounds_banded(a, DEFAULT_SLACK)?,
        Some(b) => {
            check_consistent(a, &b, false)?;
            b
        }
    };
    let (gamma, approx) = general_approx(a, terms, &bounds)?;
    Ok(InverseCertificate {
        construction: Construction::General,
        approx,
        band_width: general_band_width(terms, a.half_bandwidth()),
        terms,
        gamma,
        bounds_used: bounds,
        error_bound: general_error_bound(&bounds, terms),
        rigor: rigor_of(&bounds),
        bdo: None,
    })
}

/// Banded inverse of a band-dominated matrix through its hard truncation
/// `A_k = B_k(A)`.
///
/// With `eps = ||A - A_k||` (required below `m_lo / 2`) and
/// `alpha = m_lo / (m_lo - eps)`, the bound is
/// `eps alpha / m_lo^2` for `||A^{-1} - A_k^{-1}||` plus
/// `(M+eps)/(m_lo/alpha)^2 * (((M+eps)^2 - (m_lo/alpha)^2) / ((M-eps)^2 + (m_lo/alpha)^2))^{n+1}`
/// for the series remainder of `A_k^{-1}`.
pub fn bdo_inverse(
    a: &DenseMatrix,
    k: usize,
    terms: usize,
    bounds: Option<SpectralBounds>,
) -> Result<InverseCertificate> {
    let n = a.size()?;
    if k >= n {
        return Err(Error::InvalidBandwidth { k, n });
    }
    let bounds = match bounds {
        None => singular_bounds(a, DEFAULT_SLACK)?,
        Some(b) => b,
    };
    let (m, big) = (bounds.m_lo, bounds.m_hi);
    let eps = band_distance_bounds(a, k)?.upper;
    if eps >= m / 2.0 {
        let min_admissible = ((k + 1)..n).find(|&kk| {
            band_distance_bounds(a, kk)
                .map(|d| d.upper < m / 2.0)
                .unwrap_or(false)
        });
        return Err(Error::TruncationTooCoarse {
            k,
            epsilon: eps,
            half_m: m / 2.0,
            min_admissible,
        });
    }
    let a_k = band_truncate(a, k)?;
    let alpha = m / (m - eps);
    let m_eff = m / alpha;
    let bounds_k = SpectralBounds {
        m_lo: m_eff,
        m_hi: big + eps,
        kappa: (big + eps) / m_eff,
        source: bounds.source,
    };
    let (gamma, approx) = general_approx(&a_k, terms, &bounds_k)?;
    let truncation_term = eps * alpha / (m * m);
    let series = series_term(big + eps, big - eps, m_eff, terms);
    Ok(InverseCertificate {
        construction: Construction::Bdo,
        approx,
        band_width: general_band_width(terms, k),
        terms,
        gamma,
        bounds_used: bounds,
        error_bound: truncation_term + series,
        rigor: rigor_of(&bounds),
        bdo: Some(BdoDetails {
            k,
            epsilon_k: eps,
            alpha_k: alpha,
            kappa_plus: (big + eps) / m_eff,
            kappa_minus: (big - eps) / m_eff,
            truncation_term,
            series_term: series,
        }),
    })
}

/// Smallest `n` whose bound is at most `tol`.
pub fn terms_for_tolerance(bounds: &SpectralBounds, mode: SeriesMode, tol: f64) -> Result<usize> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidTolerance(tol));
    }
    let bound = |n: usize| match mode {
        SeriesMode::Spd => spd_error_bound(bounds, n),
        SeriesMode::General => general_error_bound(bounds, n),
    };
    if bound(0) <= tol {
        return Ok(0);
    }
    let (m, big) = (bounds.m_lo, bounds.m_hi);
    let (prefactor, ratio) = match mode {
        SeriesMode::Spd => (1.0 / m, (big - m) / (big + m)),
        SeriesMode::General => {
            let (m2, b2) = (m * m, big * big);
            (big / m2, (b2 - m2) / (b2 + m2))
        }
    };
    // prefactor * ratio^{n+1} <= tol  <=>  n + 1 >= ln(tol / prefactor) / ln(ratio)
    let guess = ((tol / prefactor).ln() / ratio.ln()).ceil() - 1.0;
    let mut n = if guess.is_finite() && guess > 0.0 {
        guess as usize
    } else {
        0
    };
    while n > 0 && bound(n - 1) <= tol {
        n -= 1;
    }
    while bound(n) > tol {
        n += 1;
    }
    Ok(n)
}

/// Smallest `n` for which [`bdo_inverse`] at bandwidth `k` certifies `tol`.
pub fn bdo_terms_for_tolerance(
    a: &DenseMatrix,
    k: usize,
    bounds: Option<SpectralBounds>,
    tol: f64,
) -> Result<usize> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidTolerance(tol));
    }
    let cert = bdo_inverse(a, k, 0, bounds)?;
    let d = cert.bdo.expect("bdo certificate carries details");
    if d.truncation_term >= tol {
        return Err(Error::CertificateRefused(format!(
            "truncation term {:?} at k = {k} already exceeds tol {tol:?}; increase k",
            d.truncation_term
        )));
    }
    let (m, big, eps) = (cert.bounds_used.m_lo, cert.bounds_used.m_hi, d.epsilon_k);
    let m_eff = m / d.alpha_k;
    let budget = tol - d.truncation_term;
    let series = |n: usize| series_term(big + eps, big - eps, m_eff, n);
    let (u2, l2, w2) = ((big + eps).powi(2), (big - eps).powi(2), m_eff * m_eff);
    let ratio = (u2 - w2) / (l2 + w2);
    if series(0) <= budget {
        return Ok(0);
    }
    if !(ratio < 1.0) {
        return Err(Error::CertificateRefused(format!(
            "series ratio {ratio:?} at k = {k} does not contract; increase k"
        )));
    }
    let guess = ((budget / ((big + eps) / w2)).ln() / ratio.ln()).ceil() - 1.0;
    let mut n = if guess.is_finite() && guess > 0.0 {
        guess as usize
    } else {
        0
    };
    while n > 0 && series(n - 1) <= budget {
        n -= 1;
    }
    while series(n) > budget {
        n += 1;
    }
    Ok(n)
}

/// `||A^{-1} - approx||` against a dense LU inverse.
pub fn achieved_error(a: &DenseMatrix, approx: &BandedMatrix) -> Result<f64> {
    let inv = dense_inverse(a)?;
    op_norm(&inv.sub(&approx.to_dense())?)
}

/// Dense inverse by partial-pivoting LU.
pub fn dense_inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    a.size()?;
    let inv = LU::new(a.to_nalgebra())
        .try_inverse()
        .ok_or(Error::Singular {
            sigma_min: 0.0,
            sigma_max: op_norm(a)?,
        })?;
    Ok(DenseMatrix::from_nalgebra(&inv))
}
