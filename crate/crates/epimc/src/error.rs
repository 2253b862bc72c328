//! Crate-wide error type.
//!
//! Infeasible *states* are not errors: likelihood routines return
//! `f64::NEG_INFINITY` for configurations with zero density so samplers can
//! reject them through the ordinary Metropolis-Hastings ratio. Errors are
//! reserved for malformed inputs: unordered times, coincident events,
//! out-of-domain queries, unparseable files.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong constructing paths, evaluating likelihoods,
/// or ingesting data.
#[derive(Debug, Error)]
pub enum Error {
    /// Event times must be strictly increasing within a path.
    #[error("event times not strictly increasing at index {index}: {prev} then {next}")]
    NotIncreasing { index: usize, prev: f64, next: f64 },

    /// Event times must lie in the half-open interval `(0, horizon]`.
    #[error("event time {time} outside (0, {horizon}]")]
    TimeOutOfRange { time: f64, horizon: f64 },

    /// A horizon must be a finite, strictly positive real.
    #[error("horizon must be positive and finite, got {horizon}")]
    BadHorizon { horizon: f64 },

    /// Two merged paths carry an event at the identical time.
    #[error("coincident event times at t = {time}")]
    Tie { time: f64 },

    /// A query time fell outside the path's domain `[0, horizon]`.
    #[error("query time {time} outside [0, {horizon}]")]
    QueryOutOfRange { time: f64, horizon: f64 },

    /// Paths combined into one view must share a horizon.
    #[error("horizon mismatch: {first} vs {second}")]
    HorizonMismatch { first: f64, second: f64 },

    /// A compartment count went negative while walking a trajectory.
    #[error("negative {compartment} count ({count}) at t = {time}")]
    Infeasible { compartment: &'static str, count: i64, time: f64 },

    /// A path cannot be carried to exponential coordinates.
    #[error("path has a jump at t = {time} where the intensity is zero")]
    Inversion { time: f64 },

    /// An argument violated a documented precondition.
    #[error("{0}")]
    InvalidArgument(String),

    /// A data or configuration file failed to parse.
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },

    /// Underlying I/O failure.
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Builds an [`Error::InvalidArgument`] from anything displayable.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Wraps an I/O error with the path or action that triggered it.
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }
}
