//! Seeded random streams.
//!
//! Every independent piece of randomness gets its own ChaCha stream, keyed by
//! the run seed and a (tag, index) pair, so draws never depend on the order in
//! which other draws were made.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const INDEX_BITS: u32 = 56;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Tag {
    MmwPosition = 1,
    MuwPosition = 2,
    UePosition = 3,
    LosProb = 4,
    ShadowMmwLos = 5,
    ShadowMmwNlos = 6,
    ShadowMuw = 7,
    Slots = 8,
    Quota = 9,
}

pub(crate) fn stream(seed: u64, tag: Tag, index: u64) -> ChaCha8Rng {
    debug_assert!(index < (1 << INDEX_BITS));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((tag as u64) << INDEX_BITS) | index);
    rng
}

/// Index for a (row, col) pair in a matrix with `cols` columns.
pub(crate) fn pair_index(row: usize, col: usize, cols: usize) -> u64 {
    (row * cols + col) as u64
}
