//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed XML at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("{path}:{line}: malformed row: {message}")]
    MalformedRow {
        path: String,
        line: u64,
        message: String,
    },

    #[error("row {row}: missing or invalid field: {message}")]
    BadRecord { row: u64, message: String },

    #[error("duplicate person_id {0:?}")]
    DuplicateId(String),

    #[error("override references unknown person_id {0:?}")]
    UnknownPerson(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("topic count must be at least 2, got {0}")]
    BadTopicCount(usize),

    #[error("document {0} is empty after vocabulary pruning")]
    EmptyDocument(usize),

    #[error("topic id {topic_id} out of range for K={k}")]
    TopicOutOfRange { topic_id: usize, k: usize },

    #[error("feature matrix column mismatch: {0}")]
    ColumnMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("labels must be 0 or 1, found {0}")]
    NonBinaryLabel(f64),

    #[error("labels are all {0}; need both classes to fit")]
    DegenerateLabels(u8),

    #[error(
        "negative Hessian at the mode is not positive definite; \
         the posterior is too flat or bent for a Laplace approximation — \
         add data or tighten the prior scale"
    )]
    HessianNotPositiveDefinite,

    #[error("model fit did not converge; refusing to draw from the Laplace approximation")]
    NotConverged,

    #[error("non-finite probability at index {0}")]
    NonFiniteProbability(usize),

    #[error("probability {prob} with label {label} yields infinite log loss; clamp inputs first")]
    DegenerateProbability { prob: f64, label: f64 },

    #[error("feature pipeline mismatch: fit expects {expected}, matrix carries {got}")]
    PipelineMismatch { expected: String, got: String },

    #[error("ranking id sets differ: {0}")]
    IdMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
