//! Banded approximate inverses with certified error bounds.
//!
//! The crate builds Neumann-series approximations to inverses of banded and
//! band-dominated matrices, each carrying an explicit operator-norm error
//! bound, and uses them for Wiener-algebra diagnostics, beta-mixing checks
//! of Gaussian sequences and banded covariance/precision estimation.
//!
//! ```
//! use banded_inverse::{neumann_spd, BandedMatrix};
//!
//! let a = BandedMatrix::toeplitz(50, &[-1.0, 4.0, -1.0]).unwrap();
//! let cert = neumann_spd(&a, 20, None).unwrap();
//! assert!(cert.error_bound < 1e-6);
//! assert!(cert.approx.half_bandwidth() <= 20);
//! ```

pub mod covstat;
pub mod error;
pub mod invapprox;
pub mod matcore;
pub mod mixing;
pub mod spectral;
pub mod textio;
pub mod wiener;

pub use covstat::{
    banded_cov_estimator, banded_precision_estimator, empirical_cov, precision_bound_eq26,
    sample_gaussian, select_k, CovarianceEstimate, EstimateKind, SampleSet,
};
pub use error::{Error, Result};
pub use invapprox::{
    bdo_inverse, bdo_terms_for_tolerance, neumann_general, neumann_spd, terms_for_tolerance, BdoDetails, Construction,
    InverseCertificate, Rigor, SeriesMode,
};
pub use matcore::{
    band_distance_bounds, band_truncate, op_norm, BandDistance, BandedMatrix, DenseMatrix,
    IndexMetric, Permutation,
};
pub use mixing::{
    beta_criterion_profile, block_trace, gamma_profile, hellinger_affinity, hellinger_record,
    CovBlocks, HellingerAffinity,
    MixingReport, Window,
};
pub use spectral::{spd_bounds, singular_bounds, user_bounds, BoundsSource, SpectralBounds};
pub use wiener::{wiener_norm, SymbolSeries};
