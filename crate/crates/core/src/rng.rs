//! Seeded random streams.
//!
//! Every estimator run is keyed by one 64-bit seed. Independent pieces of a
//! run (the pair plan, the degree noise, each sampled pair) draw from their
//! own ChaCha8 stream so results never depend on evaluation order or on how
//! many worker threads are used.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// SplitMix64 finalizer. Used to derive per-repetition seeds from a master seed.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream layout of a single estimator run.
#[derive(Debug, Clone, Copy)]
pub struct RunStreams {
    seed: u64,
}

const PLAN_STREAM: u64 = 0;
const USER_STREAM: u64 = 1;
const PAIR_STREAM_BASE: u64 = 2;

impl RunStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn stream(&self, id: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }

    /// Randomness of the data collector's permutation σ.
    pub fn pair_plan(&self) -> StreamRng {
        self.stream(PLAN_STREAM)
    }

    /// Randomness for per-user releases that are not tied to a pair
    /// (noisy degrees, 2-star reports, ARR bits).
    pub fn users(&self) -> StreamRng {
        self.stream(USER_STREAM)
    }

    /// Randomness for the `index`-th sampled pair (its RR draws and shuffle).
    pub fn pair(&self, index: usize) -> StreamRng {
        self.stream(PAIR_STREAM_BASE + index as u64)
    }
}
