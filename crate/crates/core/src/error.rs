use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("synchronization failed: peak metric {metric:.3} below threshold {threshold:.3}")]
    SyncFailure { metric: f64, threshold: f64 },

    #[error("equalizer diverged: training MSE rose from {first:.3e} to {last:.3e}")]
    EqualizerDivergence { first: f64, last: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("stage `{stage}` failed at 1/eta = {inv_eta}: {source}")]
    Stage {
        stage: &'static str,
        inv_eta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors caused by bad configuration rather than a failed simulation stage.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::UnsupportedFormat(_) => true,
            Error::Stage { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub(crate) fn ensure_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
