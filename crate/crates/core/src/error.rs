use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
///
/// Variants split into two families: input validation (the caller handed us
/// something malformed) and numerical failure (the integrator or a runtime
/// consistency check gave up). [`Error::is_numerical`] tells them apart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("not a valid density matrix: {reason}")]
    InvalidState { reason: String },

    #[error("analytic propagator requires resonance, got omega0 = {omega0}, omega_c = {omega_c}")]
    NotResonant { omega0: f64, omega_c: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("photon cutoff {n_max} too small: weight {leakage:.3e} above the cutoff at t = {t}")]
    CutoffTooSmall { n_max: usize, leakage: f64, t: f64 },

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("scenario `{scenario}`: {source}")]
    InScenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::StepUnderflow { .. }
            | Error::TooManySteps { .. }
            | Error::NonFinite { .. }
            | Error::CutoffTooSmall { .. } => true,
            Error::InScenario { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// Time reached before a numerical failure, if any.
    pub fn time_reached(&self) -> Option<f64> {
        match self {
            Error::StepUnderflow { t }
            | Error::TooManySteps { t, .. }
            | Error::NonFinite { t }
            | Error::CutoffTooSmall { t, .. } => Some(*t),
            Error::InScenario { source, .. } => source.time_reached(),
            _ => None,
        }
    }

    pub(crate) fn in_scenario(self, name: &str) -> Self {
        match self {
            e @ Error::InScenario { .. } => e,
            other => Error::InScenario {
                scenario: name.to_string(),
                source: Box::new(other),
            },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
