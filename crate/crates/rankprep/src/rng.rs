//! Seed plumbing: one master seed, independent named sub-streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives independent generators from one seed.
///
/// Each `(label, index)` pair maps to its own ChaCha stream, so adding a new
/// consumer never shifts the draws seen by existing ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self, label: &str, index: u64) -> ChaCha8Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        hasher.update(index.to_le_bytes());
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest[..32]);
        ChaCha8Rng::from_seed(key)
    }

    /// A child stream, for handing a whole sub-experiment its own namespace.
    pub fn child(&self, label: &str, index: u64) -> SeedStream {
        use rand::RngCore;
        SeedStream::new(self.rng(label, index).next_u64())
    }
}
