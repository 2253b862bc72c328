//! Exact-event-time Bayesian inference for stochastic SIR/SEIR epidemic models.
//!
//! The crate represents an epidemic as a set of counting processes with
//! exact (continuous) event times — infections, progressions, removals —
//! and provides:
//!
//! * exact joint log-likelihoods and their birth-process factorization
//!   ([`likelihood`]);
//! * Gillespie simulation of SIR/SEIR outbreaks ([`simulate`]);
//! * two data-augmentation MCMC samplers for partially observed outbreaks:
//!   a single-site reversible-jump benchmark and a whole-path birth-process
//!   proposal sampler ([`sampler`]);
//! * chain diagnostics (effective sample size, summaries) ([`diagnostics`]);
//! * analytic tools for the accuracy of time-discretized approximations
//!   ([`theory`]).
//!
//! The primary interface is the `examples/` directory — one runnable
//! example per capability — with a thin `epimc` binary wrapping the same
//! entry points for scripted use.

pub mod cli;
pub mod config;
pub mod dataio;
pub mod diagnostics;
pub mod error;
pub mod intensity;
pub mod likelihood;
pub mod path;
pub mod rng;
pub mod sampler;
pub mod simulate;
pub mod theory;

pub use error::{Error, Result};
