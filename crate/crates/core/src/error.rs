use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge: estimated error {error:.3e} above tolerance {tolerance:.3e} after {subdivisions} subdivisions")]
    NonConvergent {
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },
    #[error("iteration did not converge: {0}")]
    IterationLimit(String),
    #[error("root is not bracketed: f({lo}) = {f_lo:.6e}, f({hi}) = {f_hi:.6e}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("matrix is not symmetric positive definite to working precision")]
    IllConditioned,
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("signal rate {alpha} is too close to noise rate {beta} for the closed form")]
    NearDegenerateRates { alpha: f64, beta: f64 },
    #[error("closed form requires a Laplace signal in Laplace or Laplace-mixture noise")]
    ClosedFormUnavailable,
    #[error("observation density {0:.3e} too small to divide by")]
    DivisionNearZero(f64),
    #[error("estimator gain {0:.3e} is too small to rescale")]
    DegenerateGain(f64),
    #[error("residual sigma_x^2 - theta' R^-1 theta = {0:.3e} is not positive")]
    DegenerateResidual(f64),
    #[error("SNR denominator g'(sigma_x^2 R - theta theta')g = {0:.3e} is not positive")]
    DegenerateDenominator(f64),
    #[error("theta' R^-1 theta = {0:.3e} is not positive")]
    DegenerateTheta(f64),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter(_) | Error::DimensionMismatch { .. } | Error::ClosedFormUnavailable
        )
    }
}
