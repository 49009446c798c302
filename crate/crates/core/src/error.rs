//! Error type shared by every solver and pipeline stage.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RodError {
    /// An argument lies outside the range where a function or correlation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Dimensionless groups outside the validity range of an empirical correlation.
    #[error("{correlation} outside validity range: {detail}")]
    CorrelationValidity { correlation: &'static str, detail: String },

    #[error("simulation error at z = {z:.6} m: {message}")]
    Simulation { z: f64, message: String },

    /// Iterative solver failed; carries the residual history for diagnosis.
    #[error("{solver} did not converge after {} iterations (last residual {:?})", residuals.len(), residuals.last())]
    NonConvergence { solver: &'static str, residuals: Vec<f64> },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("non-finite gradient in batch {batch}")]
    NonFiniteGradient { batch: usize },

    #[error("training error: {0}")]
    Training(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("case {case_id} failed: {source}")]
    Case {
        case_id: String,
        #[source]
        source: Box<RodError>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl RodError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        RodError::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        RodError::Config(msg.into())
    }

    /// Short machine-readable category, used for CLI error JSON and exit codes.
    pub fn kind(&self) -> &'static str {
        match self {
            RodError::Domain(_) => "domain",
            RodError::Config(_) => "config",
            RodError::CorrelationValidity { .. } => "correlation_validity",
            RodError::Simulation { .. } => "simulation",
            RodError::NonConvergence { .. } => "non_convergence",
            RodError::Structural(_) => "structural",
            RodError::NonFiniteGradient { .. } => "numerical",
            RodError::Training(_) => "training",
            RodError::UndefinedMetric(_) => "undefined_metric",
            RodError::Case { source, .. } => source.kind(),
            RodError::Io(_) => "io",
            RodError::Csv(_) | RodError::Json(_) => "format",
        }
    }
}

impl From<csv::Error> for RodError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => RodError::Io(io),
                _ => unreachable!(),
            }
        } else {
            RodError::Csv(e)
        }
    }
}

pub type Result<T, E = RodError> = std::result::Result<T, E>;
