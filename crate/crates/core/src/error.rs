use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid segment [{lo}, {hi}]: {reason}")]
    InvalidSegment { lo: f64, hi: f64, reason: String },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid market: {0}")]
    InvalidMarket(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("subsidy cap s = {s} violates the {bound} bound {limit}")]
    SubsidyOutOfRange {
        s: f64,
        bound: &'static str,
        limit: f64,
    },

    #[error("choice (q = {q}, p = {p}) is infeasible: {reason}")]
    Infeasible { q: f64, p: f64, reason: String },

    #[error("price bound violated at z = {z}: V = {value} is on the wrong side of p_bar = {p_bar}")]
    Precondition { z: f64, value: f64, p_bar: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{context}: {message}")]
    Input { context: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            domain: "[0, 1]",
        })
    }
}
