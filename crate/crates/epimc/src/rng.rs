//! Deterministic, stream-splittable random number generation.
//!
//! Every stochastic routine in this crate draws from a [`RngStream`]: a
//! counter-based ChaCha generator addressed by a `(seed, stream)` pair.
//! Distinct streams under the same seed are statistically independent, so
//! parallel chains and Monte-Carlo replicates can each own a stream without
//! coordinating draw counts. Identical `(seed, stream)` pairs always
//! reproduce the identical draw sequence.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded random stream with a stable identity.
///
/// Wraps a ChaCha8 generator keyed by `seed` and positioned on stream
/// `stream`. ChaCha's 64-bit stream field is a block-counter namespace, so
/// two streams never overlap regardless of how many values either consumes.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    /// Creates the stream `stream` of the generator family keyed by `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    /// The seed this stream was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream id this stream was created with.
    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Derives a fresh, independent stream of the same seed.
    ///
    /// Stream ids are partitioned by use: callers pick disjoint `child` ids
    /// under a parent id via `parent * SUBSTREAM_SPAN + 1 + child`. Chains
    /// use small parent ids, so the arithmetic never collides in practice.
    pub fn substream(&self, child: u64) -> Self {
        Self::new(self.seed, self.stream.wrapping_mul(SUBSTREAM_SPAN).wrapping_add(1 + child))
    }

    /// Uniform draw on the open interval `(0, 1)`.
    ///
    /// Both endpoints are excluded so logarithms and divisions by the result
    /// are always finite.
    pub fn open01(&mut self) -> f64 {
        loop {
            let u: f64 = self.inner.gen();
            if u > 0.0 && u < 1.0 {
                return u;
            }
        }
    }

    /// Uniform draw on the open interval `(lo, hi)`.
    pub fn uniform_open(&mut self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo < hi, "empty interval ({lo}, {hi})");
        loop {
            let t = lo + (hi - lo) * self.inner.gen::<f64>();
            if t > lo && t < hi {
                return t;
            }
        }
    }

    /// Standard exponential draw (rate 1), strictly positive.
    pub fn exp1(&mut self) -> f64 {
        -self.open01().ln()
    }

    /// Exponential draw with the given rate, strictly positive.
    pub fn exp(&mut self, rate: f64) -> f64 {
        debug_assert!(rate > 0.0, "exponential rate must be positive, got {rate}");
        self.exp1() / rate
    }

    /// Gamma draw with the given shape and rate parameters.
    pub fn gamma(&mut self, shape: f64, rate: f64) -> f64 {
        let dist = rand_distr::Gamma::new(shape, 1.0 / rate)
            .expect("gamma parameters must be positive and finite");
        rand_distr::Distribution::sample(&dist, &mut self.inner)
    }

    /// Uniform integer draw from `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0, "cannot draw an index from an empty range");
        self.inner.gen_range(0..n)
    }

    /// Uniform integer draw from the inclusive range `lo..=hi`.
    pub fn int_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi, "empty integer range {lo}..={hi}");
        self.inner.gen_range(lo..=hi)
    }

    /// Bernoulli draw: true with probability `min(1, exp(log_prob))`.
    ///
    /// Accepts the probability in log space so Metropolis-Hastings ratios
    /// never leave the log domain; `-inf` always yields `false`.
    pub fn accept_log(&mut self, log_prob: f64) -> bool {
        if log_prob >= 0.0 {
            return true;
        }
        if log_prob == f64::NEG_INFINITY {
            return false;
        }
        self.open01().ln() < log_prob
    }

    /// Draws `m` distinct indices from `0..n`, in sorted order.
    pub fn distinct_indices(&mut self, n: usize, m: usize) -> Vec<usize> {
        debug_assert!(m <= n, "cannot draw {m} distinct indices from 0..{n}");
        let mut picked = rand::seq::index::sample(&mut self.inner, n, m).into_vec();
        picked.sort_unstable();
        picked
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Gap between consecutive parent ids in the substream id space.
const SUBSTREAM_SPAN: u64 = 0x9E37_79B9_7F4A_7C15;
