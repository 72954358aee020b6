use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid player count {0}")]
    InvalidSize(usize),

    #[error("carrier coalition must be non-empty")]
    InvalidCarrier,

    #[error("game has {n} players, exhaustive routines support at most {max}")]
    Size { n: usize, max: usize },

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("k = {k} is outside 1..={n}")]
    InvalidK { k: usize, n: usize },

    #[error("evaluation budget of {limit} calls exhausted")]
    BudgetExhausted { limit: u64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("players must be distinct, got {0} twice")]
    SamePlayer(usize),

    #[error("budget {budget} is not a multiple of {step}")]
    NotMultiple { budget: u64, step: u64 },

    #[error("config error at line {line}, field `{field}`: {msg}")]
    Config {
        line: usize,
        field: String,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn config(line: usize, field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            field: field.into(),
            msg: msg.into(),
        }
    }
}
