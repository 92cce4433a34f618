use thiserror::Error;

/// Errors raised by the statistical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatError {
    #[error("sample is empty")]
    EmptySample,
    #[error("{what} requires at least {needed} observations, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("{0}: zero variance")]
    ZeroVariance(&'static str),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

/// Errors raised while ingesting or reshaping tabular data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column:?}: {value:?} is not a finite number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column {column:?}: missing value")]
    MissingCell { row: usize, column: String },
    #[error("duplicate header name {0:?}")]
    DuplicateHeader(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("column {0:?} is not numeric")]
    NotNumeric(String),
    #[error("column {0:?} is numeric; cast it to a categorical scale to use it as a factor")]
    NumericFactor(String),
    #[error("at least 2 treatments required, factor {factor:?} has {levels}")]
    TooFewTreatments { factor: String, levels: usize },
    #[error("treatment {0:?} has no observations")]
    EmptyGroup(String),
    #[error("duplicate treatment label {0:?}")]
    DuplicateLabel(String),
}

pub type StatResult<T> = Result<T, StatError>;
