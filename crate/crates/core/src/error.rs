use thiserror::Error;

/// Errors raised by the signal model, estimator, detector and harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("payload has {got} bits, frame expects {expected}")]
    PayloadLength { expected: usize, got: usize },

    #[error("timing offset {tau} violates N_p > 2|tau| for N_p = {pilot_bit_samples}")]
    UndetectableOffset { tau: i64, pilot_bit_samples: usize },

    #[error("clock offset {offset} leaves the frame (allowed range {min}..={max})")]
    OffsetOutOfRange { offset: i64, min: i64, max: i64 },

    #[error("window [{start}, {end}) lies outside a waveform of {len} samples")]
    WindowOutOfRange { start: i64, end: i64, len: usize },

    #[error("transition point {n0} outside 1..={max}")]
    TransitionOutOfRange { n0: usize, max: usize },

    #[error("all-zero received segment; variance estimate is zero")]
    DegenerateSegment,

    #[error("degenerate channel: P0 = P1 = {0}, energy detection impossible")]
    DegenerateChannel(f64),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
