use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not Hermitian (residual {residual:e} > tolerance {tol:e})")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("eigenvector pair is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },
    #[error("basis pairs are not related by a phase (residual {residual:e})")]
    NotPhaseRelated { residual: f64 },
    #[error("amplitude matrices do not chain: left ends at {left}, right starts at {right}")]
    DirectionMismatch { left: String, right: String },
    #[error("amplitude matrices use different phase conventions ({left} vs {right})")]
    ConventionMismatch { left: String, right: String },
    #[error("operation requires the old phase convention, got {0}")]
    ConventionUnsupported(String),
    #[error("invariant `{what}` violated (residual {residual:e})")]
    InvariantViolated { what: &'static str, residual: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot parse {what} from `{input}`")]
    Parse { what: &'static str, input: String },
}

pub type Result<T> = std::result::Result<T, SpinError>;
