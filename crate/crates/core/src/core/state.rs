//! Chain states and the density/kernel contracts.

use std::sync::Arc;

use super::error::{Error, Result};
use super::rng::RngStream;

/// One point of the chain's state space: a fixed-length real vector.
/// Parameters and latent variables are concatenated into one vector so that
/// every sampler shares a single storage path.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    coords: Vec<f64>,
}

impl State {
    /// Build a state, asserting all entries finite in debug builds.
    pub fn new(coords: Vec<f64>) -> Self {
        debug_assert!(
            coords.iter().all(|v| v.is_finite()),
            "state entries must be finite"
        );
        Self { coords }
    }

    /// Checked constructor for externally supplied coordinates.
    pub fn try_new(coords: Vec<f64>) -> Result<Self> {
        if let Some(v) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite state entry: {v}")));
        }
        Ok(Self { coords })
    }

    /// One-dimensional state.
    pub fn scalar(x: f64) -> Self {
        Self::new(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }
}

impl From<Vec<f64>> for State {
    fn from(coords: Vec<f64>) -> Self {
        Self::new(coords)
    }
}

/// Evaluation contract for an unnormalized target: `log_density` returns
/// log h(x), with minus infinity exactly when x is outside the support.
/// Implementations must never return NaN for finite input.
pub trait LogDensity: Send + Sync {
    fn dim(&self) -> usize;
    fn log_density(&self, x: &State) -> f64;
}

pub type SharedLogDensity = Arc<dyn LogDensity>;

impl LogDensity for SharedLogDensity {
    fn dim(&self) -> usize {
        self.as_ref().dim()
    }
    fn log_density(&self, x: &State) -> f64 {
        self.as_ref().log_density(x)
    }
}

/// A Markov transition rule. Given the same input state and the same stream
/// state, `step` must produce the same output; all randomness comes from
/// `rng`.
pub trait TransitionKernel: Send + Sync {
    fn dim(&self) -> usize;

    /// Advance one step. Returns the new state and whether the move was an
    /// acceptance (kernels without an accept/reject stage report `true`).
    fn step(&self, x: &State, rng: &mut RngStream) -> Result<(State, bool)>;
}

pub type SharedKernel = Arc<dyn TransitionKernel>;

impl TransitionKernel for SharedKernel {
    fn dim(&self) -> usize {
        self.as_ref().dim()
    }
    fn step(&self, x: &State, rng: &mut RngStream) -> Result<(State, bool)> {
        self.as_ref().step(x, rng)
    }
}
