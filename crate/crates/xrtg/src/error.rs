use std::path::PathBuf;

/// Unified error type for the whole pipeline.
///
/// Variants map onto the CLI's exit-code contract: `PcapParse`, `Format` and
/// `Io` are input problems (exit 2), `EmptyData` is 3, `UnknownStream` is 4,
/// `ConfigMismatch` is 5, everything else is an internal error (10).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("pcap parse error at byte {offset}: {reason}")]
    PcapParse { offset: u64, reason: String },

    #[error("{}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no data: {0}")]
    EmptyData(String),

    #[error("unknown stream id {id:?}; valid ids: {valid}")]
    UnknownStream { id: String, valid: String },

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format { path: path.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
