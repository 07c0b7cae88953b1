//! Seeded random streams. One run seed fans out into independent ChaCha
//! streams, one per consumer, so adding draws in one place never shifts
//! another module's randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_PAIRS: u64 = 1;
pub const STREAM_INDEPENDENCE: u64 = 2;
pub const STREAM_KERNEL: u64 = 3;
pub const STREAM_CERTIFY: u64 = 4;
pub const STREAM_NUMAG: u64 = 5;
pub const STREAM_TARGET: u64 = 6;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A stream for sub-task `index` of consumer `id`.
pub fn substream(seed: u64, id: u64, index: u64) -> ChaCha8Rng {
    stream(seed, (id << 32) | (index & 0xffff_ffff))
}
