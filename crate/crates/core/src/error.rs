use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty signal: {0}")]
    EmptySignal(String),

    #[error("invalid window length {0}; need at least 2")]
    InvalidWindow(usize),

    #[error("invalid frame spec: {0}")]
    InvalidFrameSpec(String),

    #[error("invalid sample rate {0} Hz")]
    InvalidSampleRate(u32),

    #[error("unsupported sample rate {0} Hz; need at least 1000 Hz")]
    UnsupportedRate(u32),

    #[error("autocorrelation lag {max_lag} needs more than {len} samples")]
    InvalidLag { max_lag: usize, len: usize },

    #[error("degenerate frame: zero-lag autocorrelation {0} is not positive")]
    DegenerateFrame(f64),

    #[error(
        "levinson recursion broke down at order {order} (reflection coefficient {reflection})"
    )]
    NumericalBreakdown { order: usize, reflection: f64 },

    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),

    #[error("unsupported channel count {0}; only mono audio is accepted")]
    UnsupportedChannels(u32),

    #[error("corrupt audio file: {0}")]
    CorruptFile(String),

    #[error("label parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("phone map error on line {line}: {message}")]
    PhoneMap { line: usize, message: String },

    #[error("manifest error on line {line}: {message}")]
    Manifest { line: usize, message: String },

    #[error("cannot scale noise against a zero-power signal")]
    ZeroSignalPower,

    #[error("threshold sweep is undefined: {0} pool is empty")]
    UndefinedSweep(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping any file-context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::File { source, .. } => source.root(),
            other => other,
        }
    }
}
