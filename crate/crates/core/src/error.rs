use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: `{field}` {reason}")]
    Config { field: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible instance: sum of minimum quotas {sum_min} <= agents {agents} <= sum of maximum quotas {sum_max} does not hold")]
    InfeasibleInstance {
        sum_min: usize,
        agents: usize,
        sum_max: usize,
    },

    #[error("invalid instance: {0}")]
    Instance(String),

    #[error("inconsistent matching: {0}")]
    Structural(String),

    #[error("enumeration of {size} assignments exceeds budget of {budget}")]
    EnumerationBudget { size: f64, budget: u64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("verification of {policy} failed on run {run}: {detail}")]
    Verification {
        policy: String,
        run: usize,
        detail: String,
    },

    #[error("unknown figure `{0}` (expected fig3, fig4, fig5, fig6 or fig7)")]
    UnknownFigure(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
