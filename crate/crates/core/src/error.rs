use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("MissingFile: {0}")]
    MissingFile(PathBuf),
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
    #[error("RaggedRows: row {0} has a different column count")]
    RaggedRows(usize),
    #[error("NonFiniteValue: row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("Parse: line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("UnknownKey: {0}")]
    UnknownKey(String),
    #[error("InvariantViolation: {key}: {msg}")]
    InvariantViolation { key: String, msg: String },
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("LengthMismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("PatchTooLarge: patch size {patch_size} exceeds twice the series length {len}")]
    PatchTooLarge { patch_size: usize, len: usize },
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("SingularSystem: normal matrix is not positive definite")]
    SingularSystem,
    #[error("NumericalFailure: {0}")]
    NumericalFailure(String),
    #[error("DegenerateLabels: {0}")]
    DegenerateLabels(&'static str),
    #[error("ScoreMismatch: {0}")]
    ScoreMismatch(String),
    #[error("Json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable variant name, used as the machine-readable error prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingFile(_) => "MissingFile",
            Error::Io(_) => "Io",
            Error::RaggedRows(_) => "RaggedRows",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::Parse { .. } => "Parse",
            Error::UnknownKey(_) => "UnknownKey",
            Error::InvariantViolation { .. } => "InvariantViolation",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::PatchTooLarge { .. } => "PatchTooLarge",
            Error::InvalidInput(_) => "InvalidInput",
            Error::SingularSystem => "SingularSystem",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::DegenerateLabels(_) => "DegenerateLabels",
            Error::ScoreMismatch(_) => "ScoreMismatch",
            Error::Json(_) => "Json",
        }
    }

    /// True for failures that originate in the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::SingularSystem | Error::NumericalFailure(_))
    }
}
