//! Deterministic randomness: one 64-bit seed, one ChaCha stream per case.
//!
//! ChaCha is counter based, so the stream for a case depends only on the seed and the case id,
//! never on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn case_rng(seed: u64, case_id: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(case_id));
    rng
}

fn stream_id(case_id: &str) -> u64 {
    let h = Sha256::digest(case_id.as_bytes());
    u64::from_le_bytes(h[..8].try_into().expect("eight bytes"))
}
