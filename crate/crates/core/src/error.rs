use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("glue mismatch: {0}")]
    GlueMismatch(String),

    #[error("matrix is not SPD: pivot {pivot:e} at elimination step {step}")]
    NotSpd { step: usize, pivot: f64 },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("infeasible window: {0}")]
    InfeasibleWindow(String),

    #[error("no crossing: {0}")]
    NoCrossing(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// Short machine-readable kind, used on the CLI's stderr.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::InvalidMesh(_) => "invalid-mesh",
            Error::GlueMismatch(_) => "glue-mismatch",
            Error::NotSpd { .. } => "not-spd",
            Error::NoConvergence(_) => "no-convergence",
            Error::InfeasibleWindow(_) => "infeasible-window",
            Error::NoCrossing(_) => "no-crossing",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
            Error::Serialization(_) => "serialization",
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotSpd { .. }
                | Error::NoConvergence(_)
                | Error::NoCrossing(_)
                | Error::InfeasibleWindow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
