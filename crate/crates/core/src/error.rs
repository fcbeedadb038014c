use thiserror::Error;

pub type Result<T> = std::result::Result<T, SqsError>;

#[derive(Debug, Error)]
pub enum SqsError {
    /// Invalid configuration value (qubit count, rates, sizes).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Caller violated an operation precondition.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("power iteration did not converge after {iterations} iterations (last Rayleigh quotient {last_rayleigh})")]
    Convergence { iterations: usize, last_rayleigh: f64 },

    #[error("ingestion error: {0}")]
    Ingestion(String),

    #[error("individual {index}: {source}")]
    Individual {
        index: usize,
        #[source]
        source: Box<SqsError>,
    },

    #[error("generation {generation}: {source}")]
    Generation {
        generation: usize,
        #[source]
        source: Box<SqsError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SqsError {
    /// Strips individual/generation annotations.
    pub fn root(&self) -> &SqsError {
        match self {
            SqsError::Individual { source, .. } | SqsError::Generation { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by floating point trouble rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self.root(), SqsError::Numeric(_) | SqsError::Convergence { .. })
    }
}
