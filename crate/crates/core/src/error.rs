use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Bm2Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Bm2Error {
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },

    #[error("invalid rating scale: {0}")]
    InvalidScale(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid block array: {0}")]
    InvalidBlockArray(String),

    #[error("non-finite ELBO at iteration {iteration}")]
    NonFiniteElbo { iteration: usize },

    #[error("index out of range: {what} {index} (size {size})")]
    IndexOutOfRange { what: &'static str, index: usize, size: usize },

    #[error("prediction and truth key sets differ; missing predictions for {missing_predictions:?}, unexpected predictions for {unexpected:?}")]
    KeyMismatch {
        missing_predictions: Vec<(usize, usize)>,
        unexpected: Vec<(usize, usize)>,
    },

    #[error("PMF objective increased for {epochs} consecutive epochs (last epoch {last_epoch}); try a smaller learning_rate")]
    PmfDiverged { epochs: usize, last_epoch: usize },

    #[error("unsupported builtin scenario size {0}; expected 5, 7 or 9")]
    UnsupportedScenario(usize),

    #[error("candidate (K={k}, L={l}) fold {fold}: {source}")]
    CrossValidation {
        k: usize,
        l: usize,
        fold: usize,
        #[source]
        source: Box<Bm2Error>,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Bm2Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Bm2Error::Io { path: path.into(), source }
    }
}
