use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JcmError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (max |A - A^H| = {deviation:e}, tolerance {tolerance:e})")]
    NonHermitian { deviation: f64, tolerance: f64 },

    #[error("function undefined at eigenvalue {eigenvalue} (evaluated to {value})")]
    FunctionDomain { eigenvalue: f64, value: f64 },

    #[error("negative radicand {radicand:e} in T(E) at E = {energy}")]
    NegativeRadicand { energy: f64, radicand: f64 },

    #[error("T(E) vanishes at E = {energy}; alpha(E) is singular")]
    SingularAlpha { energy: f64 },

    #[error("excitation index {n} out of range (valid 0..={max})")]
    IndexOutOfRange { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate mixing angle: {0}")]
    Degenerate(String),

    #[error("no charge block admits a positive xi^2 (first offender: block {block}, xi^2 = {value})")]
    XiSquared { block: usize, value: f64 },

    #[error("J0 = T(H)/(2g^2) + nu is undefined at g = 0")]
    ZeroCoupling,

    #[error("empty excitation range")]
    EmptyRange,
}

impl JcmError {
    /// True for failures of a scalar function on part of the spectrum,
    /// as opposed to malformed input.
    pub fn is_numeric_domain(&self) -> bool {
        matches!(
            self,
            JcmError::FunctionDomain { .. }
                | JcmError::NegativeRadicand { .. }
                | JcmError::SingularAlpha { .. }
                | JcmError::XiSquared { .. }
                | JcmError::Degenerate(_)
                | JcmError::ZeroCoupling
                | JcmError::NonHermitian { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, JcmError>;
