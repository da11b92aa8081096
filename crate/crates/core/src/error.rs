use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate ensemble: every sample of center {center} has a zero Jacobian entry at t = {time}")]
    DegenerateEnsemble { center: usize, time: usize },

    #[error("numerical underflow: OTOC value {value:e} for center {center} at t = {time}")]
    NumericalUnderflow {
        center: usize,
        time: usize,
        value: f64,
    },

    #[error(
        "insufficient points: fit window [{t_min}, {t_max}] holds {found} points, need at least 3"
    )]
    InsufficientPoints {
        t_min: usize,
        t_max: usize,
        found: usize,
    },

    #[error("division by zero: AL_q + AL_c = 0 at t = {0}")]
    DivisionByZero(usize),

    #[error("dense oracle limited to D <= {limit}, got D = {dim}")]
    SizeLimit { dim: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
