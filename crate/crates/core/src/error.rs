use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Every variant maps to a stable machine-readable code through [`Error::code`]
/// and to a process exit class through [`Error::is_solver_failure`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("root order r = {0} must be an odd integer >= 3")]
    InvalidRoot(i64),

    #[error("colors are not r-admissible: {0}")]
    NotAdmissible(String),

    #[error("argument {0} lies on a branch cut")]
    BranchCut(String),

    #[error("argument {0} lies within 1e-6 of a pole")]
    NearPole(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("unsupported slope {p}/{q}: need gcd(p, q) = 1, q >= 1 and |p/q| > 1")]
    UnsupportedSlope { p: i64, q: i64 },

    #[error("cone angle {angle} exceeds the small-angle limit {limit}; pass force to override")]
    OutsideSmallAngleRegime { angle: f64, limit: f64 },

    #[error("critical point solver failed: {0}")]
    SolverFailed(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("unknown strategy {name:?}; available: {available}")]
    UnknownStrategy { name: String, available: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidRoot(_) => "invalid_root",
            Error::NotAdmissible(_) => "not_admissible",
            Error::BranchCut(_) => "branch_cut",
            Error::NearPole(_) => "near_pole",
            Error::QuadratureNotConverged(_) => "quadrature_not_converged",
            Error::InvalidPresentation(_) => "invalid_presentation",
            Error::UnsupportedSlope { .. } => "unsupported_slope",
            Error::OutsideSmallAngleRegime { .. } => "outside_small_angle_regime",
            Error::SolverFailed(_) => "solver_failed",
            Error::Degenerate(_) => "degenerate",
            Error::Parse { .. } => "parse_error",
            Error::UnknownStrategy { .. } => "unknown_strategy",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Io(_) => "io_error",
        }
    }

    /// True for numerical failures (as opposed to bad input).
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::SolverFailed(_) | Error::Degenerate(_) | Error::QuadratureNotConverged(_))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
