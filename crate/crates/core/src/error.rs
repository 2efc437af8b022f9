use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid half-bandwidth {k} for a {n}x{n} matrix (need k < n)")]
    InvalidBandwidth { k: usize, n: usize },

    #[error("diagonal offset {offset} out of range for a {n}x{n} matrix")]
    OutOfRange { offset: i64, n: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is numerically singular (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    Singular { sigma_min: f64, sigma_max: f64 },

    #[error("invalid spectral bounds: need 0 < m_lo <= M_hi, got m_lo = {m_lo}, M_hi = {m_hi}")]
    InvalidBounds { m_lo: f64, m_hi: f64 },

    #[error("certificate refused: {0}")]
    CertificateRefused(String),

    #[error(
        "truncation at k = {k} too coarse: eps_k = {epsilon:e} >= m_lo/2 = {half_m:e}{}",
        match min_admissible {
            Some(k) => format!("; minimal admissible k = {k}"),
            None => "; no admissible k below n".to_string(),
        }
    )]
    TruncationTooCoarse {
        k: usize,
        epsilon: f64,
        half_m: f64,
        min_admissible: Option<usize>,
    },

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("metric has {metric} indices but matrix has size {matrix}")]
    MetricMismatch { metric: usize, matrix: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("joint covariance is degenerate: cross eigenvalue {eigenvalue} >= 1")]
    DependenceDegenerate { eigenvalue: f64 },

    #[error("invalid index window: {0}")]
    InvalidWindow(String),

    #[error("need at least {required} samples, got {actual}")]
    InsufficientSamples { required: usize, actual: usize },

    #[error("inadmissible truncation: delta_k = {delta_k:e} must be below m/2 = {half_m:e}")]
    InadmissibleTruncation { delta_k: f64, half_m: f64 },

    #[error("banded estimate B_k(S) is not positive definite (smallest eigenvalue {min_eigenvalue:e}); use more samples or a smaller k")]
    BandedEstimateIndefinite { min_eigenvalue: f64 },

    #[error("empty k grid")]
    EmptyGrid,

    #[error("symbol support overflows the offset range (m_max = {m_max})")]
    SymbolOverflow { m_max: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True when the input was well formed but fails a mathematical
    /// precondition (definiteness, invertibility, admissible truncation).
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::NotSymmetric { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::Singular { .. }
                | Error::CertificateRefused(_)
                | Error::TruncationTooCoarse { .. }
                | Error::DependenceDegenerate { .. }
                | Error::InadmissibleTruncation { .. }
                | Error::BandedEstimateIndefinite { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
