use thiserror::Error;

/// Errors raised anywhere in the triage model.
#[derive(Debug, Error)]
pub enum TriageError {
    #[error("invalid profile field `{field}`: {reason}")]
    InvalidProfile { field: String, reason: String },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("infeasible plan: {0}")]
    Infeasible(String),

    #[error("missing arc cost for {0}")]
    MissingCost(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("inconsistent exogenous draw: {0}")]
    InvalidDraw(String),

    #[error("iteration {iteration}, epoch {epoch}: {source}")]
    Training {
        iteration: u64,
        epoch: u32,
        #[source]
        source: Box<TriageError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl TriageError {
    pub(crate) fn profile(field: impl Into<String>, reason: impl Into<String>) -> Self {
        TriageError::InvalidProfile {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, TriageError>;
