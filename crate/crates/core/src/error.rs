use std::path::PathBuf;

/// Errors raised anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: cannot parse {token:?} as a number")]
    Parse { line: usize, token: String },

    #[error("line {line}: invalid weight {weight}")]
    InvalidWeight { line: usize, weight: f64 },

    #[error("graph has no edges")]
    NoEdges,

    #[error("total out-strength is zero, the projection operator is undefined")]
    DegenerateOperator,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("state component {index} = {value} lies outside the model domain")]
    Domain { index: usize, value: f64 },

    #[error("step size underflow at t = {t} (h = {h})")]
    Stiffness { t: f64, h: f64 },

    #[error("non-finite state at t = {t}")]
    Divergence { t: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("no fixed points found")]
    NoRoots,

    #[error("no data")]
    NoData,

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(
        "dataset for {figure} not supplied; pass --dataset PATH pointing to a whitespace \
         or comma separated edge list (\"src dst [weight]\" per line, '%'/'#' comments)"
    )]
    DatasetMissing { figure: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Attach the offending path to an I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
