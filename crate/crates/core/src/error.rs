use thiserror::Error;

/// Signed Fourier indices of a mode, used in diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeTag {
    pub time: i64,
    pub tangential: Vec<i64>,
}

impl std::fmt::Display for ModeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(k index {}, xi index {:?})", self.time, self.tangential)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("field is not Hermitian: mode {mode} deviates from the conjugate of its partner by {defect:e}")]
    NotHermitian { mode: ModeTag, defect: f64 },

    #[error("field has content {magnitude:e} in the tangential Nyquist index at mode {mode}")]
    NyquistContent { mode: ModeTag, magnitude: f64 },

    #[error("compatibility violated at mode {mode}: {what} = {magnitude:e}")]
    Compatibility {
        mode: ModeTag,
        what: &'static str,
        magnitude: f64,
    },

    #[error("symbol undefined at mode {mode}: {what}")]
    Singular { mode: ModeTag, what: &'static str },

    #[error("not a mean-free oscillatory field: steady part has size {magnitude:e}")]
    NotOscillatory { magnitude: f64 },

    #[error("homogeneous norm is infinite: xi = 0 content {magnitude:e} at time index {time}")]
    HomogeneousZeroMode { time: i64, magnitude: f64 },

    #[error("unsupported norm parameters: {0}")]
    NormSpec(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("manufactured solution: {0}")]
    Manufactured(String),

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("field file {path}: {reason}")]
    FieldFile { path: String, reason: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attaches a mode to diagnostics raised without one.
    pub fn at_mode(self, tag: ModeTag) -> Self {
        match self {
            Error::Compatibility { mode, what, magnitude } if mode.tangential.is_empty() => {
                Error::Compatibility { mode: tag, what, magnitude }
            }
            Error::Singular { mode, what } if mode.tangential.is_empty() => {
                Error::Singular { mode: tag, what }
            }
            other => other,
        }
    }

    pub(crate) fn untagged_compatibility(what: &'static str, magnitude: f64) -> Self {
        Error::Compatibility {
            mode: ModeTag { time: 0, tangential: Vec::new() },
            what,
            magnitude,
        }
    }

    /// Exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::NormSpec(_) | Error::Grid(_) => 2,
            Error::Compatibility { .. } | Error::NyquistContent { .. } | Error::NotOscillatory { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
