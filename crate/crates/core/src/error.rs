use thiserror::Error;

/// Errors raised by the spectral, propagation and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition of the callee.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("band {band} out of range (valid: -1..={k_max})")]
    BandOutOfRange { band: i32, k_max: i32 },

    /// A run or geometry configuration cannot be honoured (box too small,
    /// unsupported prescription time, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Every constraint a run configuration violates.
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    InvalidConfig(Vec<String>),

    /// A computed quantity left the finite range.
    #[error("internal invariant broken: {0}")]
    Invariant(String),

    /// Data does not satisfy the support hypothesis of a check.
    #[error("support violation: {0}")]
    Support(String),

    #[error("fit needs at least {needed} points in the window, got {got}")]
    FitWindow { needed: usize, got: usize },

    #[error("nonpositive value {value} at t = {t} in fit window")]
    NonPositive { t: f64, value: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
