use thiserror::Error;

/// Errors raised by the models and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("indeterminate inclination: accelerometer vector has zero magnitude")]
    IndeterminateInclination,

    #[error("invalid sample: {0}")]
    InvalidSample(&'static str),

    #[error("non-monotonic input at sample {index}: {reason}")]
    NonMonotonicInput { index: usize, reason: String },

    #[error("invalid error input: {0}")]
    InvalidErrorInput(String),

    #[error("invalid throttle: {throttle} us outside [{min}, {max}]")]
    InvalidThrottle { throttle: f64, min: f64, max: f64 },

    #[error("value {value} outside [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("plant state corrupt: {0}")]
    PlantStateCorrupt(&'static str),

    #[error("no step event in trace")]
    NoStepEvent,

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("trace format error: {0}")]
    TraceFormat(String),

    #[error("run aborted at step {step}: {source}")]
    Aborted {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input (config, arguments, files) rather
    /// than a failure while a run was in progress.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Aborted { .. } | Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
