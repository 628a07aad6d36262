//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by the
//! user seed. Independent consumers (weight init, shuffling, per-tree
//! simulation) use distinct stream ids so results do not depend on call order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub(crate) mod stream {
    pub const INIT: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const GAUSSIAN: u64 = 3;
    pub const MONTE_CARLO: u64 = 4;
    pub const SPECIES: u64 = 5;
    pub const SPLIT: u64 = 6;
    /// Gene trees take `GENE_BASE + index`, one stream per tree.
    pub const GENE_BASE: u64 = 1 << 32;
}

pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
