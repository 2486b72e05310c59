//! Error type shared by every pipeline stage.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing {missing} half for segment id(s) {segment_ids:?}")]
    MissingPair {
        missing: &'static str,
        segment_ids: Vec<u64>,
    },

    #[error("malformed csv {path}: row {row}, column {column}: {detail}")]
    MalformedCsv {
        path: PathBuf,
        row: usize,
        column: usize,
        detail: String,
    },

    #[error("no class label for segment {segment_id}")]
    Label { segment_id: u64 },

    #[error("segment {segment_id}: lower half has {lower} samples, upper half has {upper}")]
    PairLength {
        segment_id: u64,
        lower: usize,
        upper: usize,
    },

    #[error("invalid synthetic profile: {0}")]
    Profile(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("cannot normalise: sum of the first {q_window} upper bins is zero")]
    ZeroDenominator { q_window: usize },

    #[error("stitch expects one lower and one upper half")]
    HalfMismatch,

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    Dimension {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    #[error("activation cache does not match model: {0}")]
    StaleCache(String),

    #[error("class {class} has {count} instances, need at least {k} for {k}-fold split")]
    InsufficientClass { class: usize, count: usize, k: usize },

    #[error("loss became non-finite during epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("exact Shapley enumeration limited to {max} features, got {requested}")]
    SubsetTooLarge { requested: usize, max: usize },

    #[error("surrogate fit is singular: {0}")]
    SingularFit(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("session {0} was revoked; open a new session")]
    TerminalSession(String),

    #[error("clock went backwards: {now} < {last}")]
    ClockRegression { now: f64, last: f64 },

    #[error("invalid configuration for `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("unsupported format: {0}")]
    Format(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }

    /// Short stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::MissingPair { .. } => "missing_pair",
            Error::MalformedCsv { .. } => "malformed_csv",
            Error::Label { .. } => "label",
            Error::PairLength { .. } => "pair_length",
            Error::Profile(_) => "profile",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::ZeroDenominator { .. } => "zero_denominator",
            Error::HalfMismatch => "half_mismatch",
            Error::DegenerateData(_) => "degenerate_data",
            Error::Dimension { .. } => "dimension",
            Error::NonFinite(_) => "non_finite",
            Error::StaleCache(_) => "stale_cache",
            Error::InsufficientClass { .. } => "insufficient_class",
            Error::NonFiniteLoss { .. } => "non_finite_loss",
            Error::SubsetTooLarge { .. } => "subset_too_large",
            Error::SingularFit(_) => "singular_fit",
            Error::EmptyInput(_) => "empty_input",
            Error::TerminalSession(_) => "terminal_session",
            Error::ClockRegression { .. } => "clock_regression",
            Error::Config { .. } => "config",
            Error::Format(_) => "format",
        }
    }
}
