use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("infinite SINR: the link has no noise and no interference")]
    UnboundedSinr,

    #[error("quadrature did not converge on [{a}, {b}] (estimate {estimate}, error {error})")]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("rate tail did not decay below {threshold} before c = {c_max} bps/Hz")]
    NonConvergentTail { threshold: f64, c_max: f64 },

    #[error("cell-edge rate undefined: {0}")]
    DegenerateCdf(String),

    #[error("too many degenerate drops: {discarded} of {requested} resampled")]
    TooManyDegenerateDrops { discarded: u64, requested: u64 },

    #[error("invalid configuration:{}", list_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("malformed CSV {path}: {reason}")]
    Csv { path: String, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One rejected configuration entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    /// 1-based line in the config file; `None` for command-line overrides
    /// and cross-field checks.
    pub line: Option<usize>,
    pub key: String,
    pub reason: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: `{}`: {}", self.key, self.reason),
            None => write!(f, "`{}`: {}", self.key, self.reason),
        }
    }
}

fn list_issues(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("\n  {i}")).collect()
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Quadrature { .. } | Error::NonConvergentTail { .. } => 2,
            Error::DegenerateCdf(_) | Error::TooManyDegenerateDrops { .. } => 2,
            _ => 1,
        }
    }
}
