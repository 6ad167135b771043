use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("determinant check failed for generator {index}: det = {re} + {im}i")]
    Determinant { index: usize, re: f64, im: f64 },
    #[error("pole: c*z + d vanishes")]
    Pole,
    #[error("psi_inv of infinity is handled by the caller")]
    Infinity,
    #[error("log branch: argument has an eigenvalue on the negative real axis")]
    LogBranch,
    #[error("point lies outside the chart domain")]
    ChartDomain,
    #[error("exact arithmetic overflow: {bits} bits exceeds the cap of {cap}")]
    ExactOverflow { bits: u64, cap: u64 },
    #[error("exact mode is not available for this system")]
    ExactUnavailable,
    #[error("enumeration exceeded the cap of {cap} words")]
    CapExceeded { cap: usize },
    #[error("sampling stalled: chi did not pass {target} within {max_len} letters")]
    Stall { target: f64, max_len: usize },
    #[error("measure has mass at infinity")]
    InfinityMass,
    #[error("no usable levels in the estimation window")]
    EmptyWindow,
    #[error("measure has no samples")]
    EmptyMeasure,
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("wrong space: expected {expected}")]
    WrongSpace { expected: &'static str },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
