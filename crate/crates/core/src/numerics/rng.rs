use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic stream of uniform reals in `[0, 1)`.
///
/// Backed by ChaCha8 (`rand_chacha`), keyed by `seed_from_u64(seed)`. Each
/// draw consumes one 64-bit word and keeps its top 53 bits, so a given seed
/// reproduces the same sequence on every platform. [`UniformStream::fork`]
/// selects an independent ChaCha stream id under the same key, which is how
/// parallel Monte-Carlo batches stay reproducible regardless of thread count.
#[derive(Debug, Clone)]
pub struct UniformStream {
    seed: u64,
    rng: ChaCha8Rng,
}

/// Opens the uniform stream for `seed`.
pub fn rng_uniform(seed: u64) -> UniformStream {
    UniformStream::new(seed)
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sub-stream `index` of this seed, starting from its first word.
    pub fn fork(&self, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // stream 0 is the parent itself
        rng.set_stream(index.wrapping_add(1));
        Self { seed: self.seed, rng }
    }

    /// Next draw in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Next draw in the open interval `(0, 1)`.
    pub fn next_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl Iterator for UniformStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_f64())
    }
}
