//! Named random sub-streams derived from one run seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Independent generator for `name` under `seed`. The same pair always
/// yields the same stream; different names are unrelated.
pub fn stream(seed: u64, name: &str) -> StreamRng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    let digest: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

/// Sub-seed for APIs that take a `u64`.
pub fn sub_seed(seed: u64, name: &str) -> u64 {
    use rand::Rng;
    stream(seed, name).random()
}
