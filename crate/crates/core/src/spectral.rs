//! Conservative bounds on extreme eigenvalues and singular values.
//!
//! Every certificate consumes an interval `[m_lo, M_hi]` that encloses the
//! relevant spectrum, so all downstream inequalities stay valid when the
//! exact `m` and `M` are replaced by these bounds.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{BandedMatrix, DenseMatrix};

pub const DEFAULT_SLACK: f64 = 1e-8;

/// Relative asymmetry accepted as "symmetric".
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Ratio `sigma_min / sigma_max` below which a matrix counts as singular.
pub const SINGULAR_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsSource {
    /// Computed here by a floating-point eigen/singular value solve.
    Estimated,
    /// Supplied by the caller.
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    pub m_lo: f64,
    pub m_hi: f64,
    pub kappa: f64,
    pub source: BoundsSource,
}

impl SpectralBounds {
    fn checked(m_lo: f64, m_hi: f64, source: BoundsSource) -> Result<Self> {
        if !(m_lo.is_finite() && m_hi.is_finite() && m_lo > 0.0 && m_lo <= m_hi) {
            return Err(Error::InvalidBounds { m_lo, m_hi });
        }
        Ok(Self {
            m_lo,
            m_hi,
            kappa: m_hi / m_lo,
            source,
        })
    }
}

/// Caller-provided bounds, validated for `0 < m_lo <= M_hi`.
pub fn user_bounds(m_lo: f64, m_hi: f64) -> Result<SpectralBounds> {
    SpectralBounds::checked(m_lo, m_hi, BoundsSource::UserSupplied)
}

/// Extreme eigenvalues `(lambda_min, lambda_max)` of a symmetric matrix.
pub fn symmetric_extremes(a: &DenseMatrix) -> Result<(f64, f64)> {
    a.size()?;
    a.check_symmetric(SYMMETRY_TOL)?;
    let eig = SymmetricEigen::new(a.to_nalgebra()).eigenvalues;
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Bounds for a symmetric positive definite matrix:
/// `m_lo = lambda_min (1 - slack)`, `M_hi = lambda_max (1 + slack)`.
pub fn spd_bounds(a: &DenseMatrix, slack: f64) -> Result<SpectralBounds> {
    check_slack(slack)?;
    let (lo, hi) = symmetric_extremes(a)?;
    if lo <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lo });
    }
    SpectralBounds::checked(lo * (1.0 - slack), hi * (1.0 + slack), BoundsSource::Estimated)
}

pub fn spd_bounds_banded(a: &BandedMatrix, slack: f64) -> Result<SpectralBounds> {
    spd_bounds(&a.to_dense(), slack)
}

/// Bounds on the extreme singular values of an invertible matrix.
pub fn singular_bounds(a: &DenseMatrix, slack: f64) -> Result<SpectralBounds> {
    check_slack(slack)?;
    a.size()?;
    let sv = a.to_nalgebra().singular_values();
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sv.iter().copied().fold(0.0f64, f64::max);
    if !(lo > SINGULAR_RATIO * hi) {
        return Err(Error::Singular {
            sigma_min: lo,
            sigma_max: hi,
        });
    }
    SpectralBounds::checked(lo * (1.0 - slack), hi * (1.0 + slack), BoundsSource::Estimated)
}

pub fn singular_bounds_banded(a: &BandedMatrix, slack: f64) -> Result<SpectralBounds> {
    singular_bounds(&a.to_dense(), slack)
}

fn check_slack(slack: f64) -> Result<()> {
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::InvalidInput(format!(
            "slack must lie in [0, 1), got {slack}"
        )));
    }
    Ok(())
}
