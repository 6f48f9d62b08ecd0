use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed WAV data: {0}")]
    Format(String),

    #[error("unsupported audio encoding: {0}")]
    UnsupportedFormat(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("insufficient decay range: EDC only reaches {deepest_db:.1} dB ({detail})")]
    InsufficientDecayRange { deepest_db: f64, detail: String },

    #[error("band centered at {center_hz} Hz does not fit below Nyquist ({nyquist_hz} Hz)")]
    BandOutOfRange { center_hz: f64, nyquist_hz: f64 },

    #[error("expected {expected} channel(s), got {actual}")]
    ChannelCount { expected: usize, actual: usize },

    #[error("signal too short: need at least {required} samples, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid simulation config: {0}")]
    Config(String),

    #[error("could not place source and receiver after {attempts} attempts")]
    Placement { attempts: usize },

    #[error("report schema mismatch: {0}")]
    Schema(String),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
