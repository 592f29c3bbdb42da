use thiserror::Error;

/// Errors raised by the cavity models and their numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("no cavity: decay rate diverges (mirror reflectivity is zero)")]
    NoCavity,

    #[error("no stationary state: {0}")]
    NoStationaryState(&'static str),

    #[error("no unique stationary state: linear system is singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("non-finite state at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error(
        "integrator did not converge after {halvings} halvings (dt = {dt:e}, last change {change:e}, tolerance {tolerance:e})"
    )]
    NotConverged { halvings: usize, dt: f64, change: f64, tolerance: f64 },

    #[error("step budget exceeded: {required} steps needed, limit {limit}")]
    TooManySteps { required: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("wrong Fock space: {0}")]
    WrongSpace(&'static str),

    #[error("density matrix invariant violated at stored step {step} (t = {time}): {what} = {value:e}")]
    InvariantViolation { step: usize, time: f64, what: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
