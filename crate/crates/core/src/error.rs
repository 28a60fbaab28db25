use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error("validation failed for `{entity}`: {message}")]
    Validation { entity: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("singular system in component `{component}`: {message}")]
    SingularSystem { component: String, message: String },

    #[error("degenerate loss segment [{a}, {b}]")]
    DegenerateSegment { a: f64, b: f64 },

    #[error("flow {value} outside envelope range [-{limit}, {limit}]")]
    OutOfRange { value: f64, limit: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model build error: {0}")]
    ModelBuild(String),

    #[error("solver backend error: {0}")]
    Backend(String),

    #[error("scenario is infeasible: {0}")]
    InfeasibleScenario(String),

    #[error("scenario is unbounded: {0}")]
    Unbounded(String),

    #[error("capacity iteration did not converge after {iterations} iterations (last change {last_delta:.6e} MW)")]
    NotConverged { iterations: usize, last_delta: f64 },

    #[error("base case violates limits at zero transfer")]
    InfeasibleBase,
}

impl Error {
    pub(crate) fn validation(entity: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            entity: entity.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
