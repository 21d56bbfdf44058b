use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step size underflow at t = {t:e} s (h = {h:e} s)")]
    StepUnderflow { t: f64, h: f64 },

    #[error("trace drifted to {trace} at t = {t:e} s")]
    TraceViolation { t: f64, trace: f64 },

    #[error("smallest eigenvalue {min_eigenvalue:e} at t = {t:e} s")]
    PositivityViolation { t: f64, min_eigenvalue: f64 },

    #[error("trajectory norm underflow at t = {t:e} s (norm² = {norm_sq:e}); reduce the step size")]
    NormUnderflow { t: f64, norm_sq: f64 },

    #[error("steady state is not unique: {0}")]
    DegenerateSteadyState(String),

    #[error("steady state did not converge: {0}")]
    SteadyStateNotConverged(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Whether the error came from propagating a model rather than from its inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::TraceViolation { .. }
                | Error::PositivityViolation { .. }
                | Error::NormUnderflow { .. }
                | Error::DegenerateSteadyState(_)
                | Error::SteadyStateNotConverged(_)
        )
    }
}
