use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("tail exponent beta={beta} outside ({lo}, {hi})")]
    InvalidBeta { beta: f64, lo: f64, hi: f64 },
    #[error("alpha={0} outside (0, 2)")]
    InvalidAlpha(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{0} requires a heavy-tail equilibrium")]
    NeedsHeavyTail(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate linear coefficient {0:e} at mode index {1}")]
    Degenerate(f64, usize),
    #[error("quadrature did not converge: estimate {value:e}, error {error:e}")]
    Quadrature { value: f64, error: f64 },
    #[error("reference norm is zero")]
    ZeroReference,
    #[error("need at least 3 points in the fit window, got {0}")]
    TooFewPoints(usize),
    #[error("time step {dt} exceeds stability bound {bound}")]
    Cfl { dt: f64, bound: f64 },
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
