use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Master seed from which independent per-index streams are derived.
///
/// Stream `k` is the ChaCha8 keystream keyed by the master seed with stream
/// id `k`, so column `k` of a matrix does not depend on how many columns are
/// generated or in which order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(index);
        rng
    }

    /// Child seed for an independent purpose (e.g. test matrices vs columns).
    pub fn derive(&self, tag: u64) -> SeedSpec {
        SeedSpec::new(splitmix64(self.master_seed ^ splitmix64(tag.wrapping_add(0x5EED))))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
