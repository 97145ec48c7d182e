use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coordinate: {0}")]
    InvalidCoordinate(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate site id `{0}`")]
    DuplicateId(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sites `{first}` and `{second}` share coordinates; the kriging system is singular (deduplicate first)")]
    CoincidentSites { first: String, second: String },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("site `{0}` has no covariate")]
    MissingCovariate(String),

    #[error("covariate is constant across training sites; use ordinary kriging instead")]
    ConstantCovariate,

    #[error("input is constant; correlation is undefined")]
    ConstantInput,

    #[error("unknown site ids: {}", .0.join(", "))]
    UnknownIds(Vec<String>),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("{context}: {source}")]
    Method {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Error {
        Error::Method {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
