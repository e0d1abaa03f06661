use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in an analysis.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { offset: usize, line: usize, column: usize, message: String },

    #[error("NON_WELL_FOUNDED: coefficient [z^{n} u^{k}] depends on itself")]
    NonWellFounded { n: usize, k: usize },

    #[error("U_TRUNCATION_UNSTABLE: u-truncation {n_u} still changes [z^{n}] at u=1")]
    UTruncationUnstable { n: usize, n_u: usize },

    #[error("NO_CONVERGENCE: {0}")]
    NoConvergence(String),

    #[error("NEGATIVE_COORDINATE: {0}")]
    NegativeCoordinate(String),

    #[error("FIT_UNSTABLE: {0}")]
    FitUnstable(String),

    #[error("Y1_NONZERO: |y1| = {residual} exceeds {bound}")]
    Y1Nonzero { residual: String, bound: String },

    #[error("STENCIL_INCONSISTENT: {0}")]
    StencilInconsistent(String),

    #[error("UNKNOWN_ENTRY: no corpus entry named `{0}`")]
    UnknownEntry(String),

    #[error("NOT_APPLICABLE: {0}")]
    NotApplicable(String),

    #[error("PRECISION_UNDERFLOW: {0}")]
    PrecisionUnderflow(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "PARSE_ERROR",
            Error::NonWellFounded { .. } => "NON_WELL_FOUNDED",
            Error::UTruncationUnstable { .. } => "U_TRUNCATION_UNSTABLE",
            Error::NoConvergence(_) => "NO_CONVERGENCE",
            Error::NegativeCoordinate(_) => "NEGATIVE_COORDINATE",
            Error::FitUnstable(_) => "FIT_UNSTABLE",
            Error::Y1Nonzero { .. } => "Y1_NONZERO",
            Error::StencilInconsistent(_) => "STENCIL_INCONSISTENT",
            Error::UnknownEntry(_) => "UNKNOWN_ENTRY",
            Error::NotApplicable(_) => "NOT_APPLICABLE",
            Error::PrecisionUnderflow(_) => "PRECISION_UNDERFLOW",
            Error::Numeric(_) => "NUMERIC",
            Error::Io(_) => "IO",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
