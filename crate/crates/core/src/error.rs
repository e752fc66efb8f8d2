use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("linear program is infeasible")]
    Infeasible,

    /// The LP box is bounded, so this only fires on a solver defect.
    #[error("linear program reported unbounded (internal solver error)")]
    Unbounded,

    #[error(
        "exhaustive search refused: {links} links x {slots} slots exceeds the limit of {max_links} x {max_slots}"
    )]
    TooLarge {
        links: usize,
        slots: usize,
        max_links: usize,
        max_slots: usize,
    },

    #[error("scenario placement failed: {0}")]
    Placement(String),

    #[error("config: {0}")]
    Config(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
