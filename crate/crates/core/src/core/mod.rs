//! Shared contracts: states, target densities, transition kernels, seeded
//! random streams, and the chain trace record.

mod error;
mod rng;
mod state;
mod trace;

pub use error::{Error, Result};
pub use rng::{make_substream, RngStream, RNG_ALGORITHM};
pub use state::{LogDensity, SharedKernel, SharedLogDensity, State, TransitionKernel};
pub use trace::ChainTrace;

/// Substream label used for the (main) kernel moves of a chain run.
pub const STREAM_KERNEL: u64 = 0;
/// Substream label used for resampling decisions and index draws.
pub const STREAM_RESAMPLE: u64 = 1;
/// Substream label used for the auxiliary chain's kernel moves.
pub const STREAM_AUX: u64 = 2;
