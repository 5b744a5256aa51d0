//! Markov chain Monte Carlo with two acceleration schemes: resampling from
//! the chain's own past on a deterministic schedule, and importance-resampling
//! from an interleaved auxiliary chain.
//!
//! The crate is organized around a small set of contracts in [`core`]
//! ([`core::State`], [`core::LogDensity`], [`core::TransitionKernel`],
//! [`core::RngStream`]) shared by the concrete kernels in [`kernels`], the
//! two accelerated runners in [`resampling`] and [`auxiliary`], the
//! autocorrelation/inefficiency estimators in [`diagnostics`], and the
//! example targets in [`models`].
//!
//! Every run is reproducible: chains draw from labeled substreams of a
//! seeded counter-based generator, so a trace is a pure function of
//! (config, seed).

pub mod auxiliary;
pub mod core;
pub mod diagnostics;
pub mod kernels;
pub mod models;
pub mod resampling;

pub use crate::core::{Error, Result};
