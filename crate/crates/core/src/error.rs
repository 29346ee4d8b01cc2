use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pow exponent depends on `{0}`; only constant exponents can be differentiated")]
    NonConstantExponent(String),

    #[error("expression grew past {limit} nodes")]
    ExpressionTooLarge { limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown quantizing preset `{0}`")]
    UnknownPreset(String),

    #[error("quantizing function does not vanish at the origin (residual {0:e})")]
    TauNotZeroAtOrigin(f64),

    #[error("expression is not a polynomial: {0}")]
    NonPolynomial(String),

    #[error("rational arithmetic overflow")]
    Overflow,

    #[error("multi-index too large: |alpha| = {0} (limit 12)")]
    MultiIndexTooLarge(u32),

    #[error("symbol is not elliptic: {0}")]
    NotElliptic(String),

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NewtonFailure { iterations: usize, residual: f64 },

    #[error("singular Jacobian encountered (|det| = {0:e})")]
    SingularJacobian(f64),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NewtonFailure { .. } | Error::SingularJacobian(_) | Error::NonConvergence(_)
        )
    }

    /// Short machine-readable code used by the command-line front-end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "E_SYNTAX",
            Error::UnknownFunction { .. } => "E_UNKNOWN_FUNCTION",
            Error::UnboundVariable(_) => "E_UNBOUND_VARIABLE",
            Error::Domain(_) => "E_DOMAIN",
            Error::NonConstantExponent(_) => "E_NONCONST_EXPONENT",
            Error::ExpressionTooLarge { .. } => "E_EXPR_TOO_LARGE",
            Error::DimensionMismatch(_) => "E_DIMENSION",
            Error::SizeMismatch { .. } => "E_SIZE",
            Error::InvalidGrid(_) => "E_GRID",
            Error::UnknownPreset(_) => "E_PRESET",
            Error::TauNotZeroAtOrigin(_) => "E_TAU_ORIGIN",
            Error::NonPolynomial(_) => "E_NONPOLY",
            Error::Overflow => "E_OVERFLOW",
            Error::MultiIndexTooLarge(_) => "E_MULTI_INDEX",
            Error::NotElliptic(_) => "E_NOT_ELLIPTIC",
            Error::NewtonFailure { .. } => "E_NEWTON",
            Error::SingularJacobian(_) => "E_SINGULAR_JACOBIAN",
            Error::NonConvergence(_) => "E_NONCONVERGENCE",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::Unsupported(_) => "E_UNSUPPORTED",
            Error::VariantMismatch(_) => "E_VARIANT",
            Error::Format(_) => "E_FORMAT",
            Error::Io(_) => "E_IO",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
