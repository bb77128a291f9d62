use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{name}`: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("accuracy {0} is outside the support [0.5, 1]")]
    OutsideSupport(f64),

    #[error("no votes for paper; no decision possible")]
    NoVotes,

    #[error("no decided papers; cost per classified paper is undefined")]
    NoDecisions,

    #[error("decided paper `{0}` has no gold label")]
    MissingGold(String),

    #[error("theta estimate unreliable: decision informativeness {informativeness:.4} <= 0.05")]
    UnreliableEstimate { informativeness: f64 },

    #[error("no parameter triple fits the budget {budget}")]
    Infeasible { budget: f64 },

    #[error("{path}: {} invalid row(s): {}", issues.len(), join_issues(issues))]
    InvalidRows {
        path: PathBuf,
        issues: Vec<RowIssue>,
    },

    #[error("{0}: dataset is empty")]
    EmptyDataset(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("config: missing required key `{0}`")]
    MissingKey(String),

    #[error("config line {line}: key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },
}

/// A rejected input row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowIssue {
    pub line: u64,
    pub message: String,
}

fn join_issues(issues: &[RowIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("line {}: {}", i.line, i.message))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason: "must be a probability in [0, 1]",
        })
    }
}

pub(crate) fn invalid<T: ToString>(name: &'static str, value: T, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value: value.to_string(),
        reason,
    }
}
