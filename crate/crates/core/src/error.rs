use thiserror::Error;

/// Errors raised by grid construction, field operations and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation undefined on the zero field")]
    ZeroField,

    #[error("fields live on different grids")]
    GridMismatch,

    /// A dilation pushed more than the allowed fraction of mass outside the box or
    /// beyond the Nyquist band.
    #[error("rescaled field is not representable on the grid: tail mass fraction {tail:.3e} ({side})")]
    Unrepresentable { tail: f64, side: &'static str },

    #[error("family member cannot be resolved on this grid: {0}")]
    Unresolvable(String),

    #[error("box too small: half_length {have} < required {need}")]
    BoxTooSmall { need: f64, have: f64 },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("not converged after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
