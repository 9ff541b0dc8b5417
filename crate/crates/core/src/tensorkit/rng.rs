//! Named, seeded, counter-based pseudorandom streams.
//!
//! A stream is identified by `(seed, stream id)`; the stream id is derived
//! by hashing a human-readable label, so call sites write
//! `RngStream::new(seed, "dataset/record/17")` and get the same sequence on
//! every host and under any scheduling. The counter is the ChaCha word
//! position and can be saved and restored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

fn stream_id(label: &str) -> u64 {
    let digest = Sha256::digest(label.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        Self::from_ids(seed, stream_id(label))
    }

    pub fn from_ids(seed: u64, stream: u64) -> Self {
        // Mix (seed, stream) through SHA-256 so related ids give unrelated keys.
        let mut raw = [0u8; 16];
        raw[..8].copy_from_slice(&seed.to_le_bytes());
        raw[8..].copy_from_slice(&stream.to_le_bytes());
        let digest = Sha256::digest(raw);
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        RngStream {
            rng: ChaCha8Rng::from_seed(key),
            seed,
            stream,
        }
    }

    /// Derive an independent child stream from this stream's id and a label.
    pub fn substream(&self, label: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(self.stream.to_le_bytes());
        hasher.update(label.as_bytes());
        let digest = hasher.finalize();
        Self::from_ids(self.seed, u64::from_le_bytes(digest[..8].try_into().unwrap()))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Words consumed so far; `(seed, stream, counter)` pins the next draw.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn set_counter(&mut self, counter: u128) {
        self.rng.set_word_pos(counter);
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo <= hi);
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        self.rng.random_range(0..n)
    }

    /// Index draw under the given (unnormalized, nonnegative) weights.
    pub fn weighted_index(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        debug_assert!(total > 0.0);
        let mut u = self.uniform() * total;
        for (i, &w) in weights.iter().enumerate() {
            u -= w;
            if u < 0.0 {
                return i;
            }
        }
        weights.len() - 1
    }

    /// One standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// `n` standard normal draws.
    pub fn gauss(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }
}
