//! Seeded, splittable random streams.
//!
//! Every run derives all of its randomness from one root [`RngStream`].
//! Substreams are labeled: a substream is a pure function of the root seed
//! and the labels on the path to it, never of how much the parent has been
//! consumed. This is what makes degenerate-schedule reductions bit-exact
//! (the kernel stream of a plain run and of a never-firing resampled run
//! are the same stream).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Name of the generator algorithm, echoed into run configs so traces stay
/// reproducible across releases.
pub const RNG_ALGORITHM: &str = "chacha8-stream/v1";

/// A seedable counter-based random stream with labeled substreams.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    /// Root stream for a run.
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// Derive an independent substream. The result depends only on the seed,
    /// this stream's own label path, and `label` — not on the number of
    /// values already drawn from `self`.
    pub fn substream(&self, label: u64) -> Self {
        let child = splitmix64(self.stream ^ splitmix64(label.wrapping_add(1)));
        Self::with_stream(self.seed, child)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform integer in [0, n).
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        self.rng.random_range(0..n)
    }

    /// Sample from any `rand_distr` distribution.
    pub fn sample<T, D: rand_distr::Distribution<T>>(&mut self, dist: &D) -> T {
        dist.sample(&mut self.rng)
    }
}

/// Derive a labeled substream (free-function form of [`RngStream::substream`]).
pub fn make_substream(parent: &RngStream, label: u64) -> RngStream {
    parent.substream(label)
}
