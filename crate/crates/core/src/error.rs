use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The weighted energy of the path is zero, so the estimator is undefined.
    #[error("degenerate path: weighted energy I_T is zero")]
    DegeneratePath,

    #[error("quadrature failed on [{lower}, {upper}]: error estimate {error:.3e} after {intervals} subintervals")]
    QuadratureFailure {
        lower: f64,
        upper: f64,
        error: f64,
        intervals: usize,
    },

    /// The forward map could not be bracketed, or turned out not to be monotone.
    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("posterior tail mass bound {bound:.3e} exceeds tolerance {tol:.3e}; raise the support bound")]
    TailMassTooLarge { bound: f64, tol: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("too many degenerate paths: {degenerate} of {total}")]
    TooManyDegenerate { degenerate: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Numerical failures are reported with exit code 1 by the command line tool;
    /// everything else is a usage or input problem.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. }
                | Error::BracketFailure(_)
                | Error::TailMassTooLarge { .. }
                | Error::DegeneratePath
                | Error::TooManyDegenerate { .. }
        )
    }

    /// Short machine-readable tag used in error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::DegeneratePath => "degenerate_path",
            Error::QuadratureFailure { .. } => "quadrature_failure",
            Error::BracketFailure(_) => "bracket_failure",
            Error::TailMassTooLarge { .. } => "tail_mass_too_large",
            Error::InvalidConfig(_) => "invalid_config",
            Error::TooManyDegenerate { .. } => "too_many_degenerate",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
