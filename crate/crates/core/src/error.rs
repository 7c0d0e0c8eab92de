use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { key: String, line: usize },

    #[error("invalid {what}: {reason}")]
    Invalid { what: String, reason: String },

    #[error("no entry for `{key}`; available: [{}]", .available.join(", "))]
    MissingEntry { key: String, available: Vec<String> },

    #[error("no penetration loss for material `{material}` at {freq_ghz} GHz")]
    MissingMaterial { material: String, freq_ghz: f64 },

    #[error("unknown band `{0}`")]
    UnknownBand(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{freq_ghz} GHz is outside the table span [{lo_ghz}, {hi_ghz}] GHz")]
    OutOfRange {
        freq_ghz: f64,
        lo_ghz: f64,
        hi_ghz: f64,
    },

    #[error("no band meets {required_mbps} Mbps; best is `{best_band}` at {best_mbps:.3} Mbps")]
    Infeasible {
        required_mbps: f64,
        best_band: String,
        best_mbps: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what: what.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Model-domain failures (bad physical inputs) as opposed to configuration problems.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Degenerate(_) | Error::OutOfRange { .. } | Error::Infeasible { .. }
        )
    }

    /// Process exit code: 1 for configuration errors, 2 for model-domain errors.
    pub fn exit_code(&self) -> i32 {
        if self.is_domain() {
            2
        } else {
            1
        }
    }
}
