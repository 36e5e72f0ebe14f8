//! Hierarchical seed derivation.
//!
//! Every random stream is addressed by a path of integers below a root seed
//! (run → user → cluster → path). Each node's seed is a SplitMix64 hash of
//! its parent and index, so streams never overlap and adding draws at one
//! node leaves every sibling untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_RUN: u64 = 1;
pub const STREAM_USER: u64 = 2;
pub const STREAM_CLUSTER: u64 = 3;
pub const STREAM_DRAW: u64 = 4;
pub const STREAM_ORIENTATION: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedPath(u64);

impl SeedPath {
    pub fn root(seed: u64) -> Self {
        SeedPath(splitmix64(seed ^ 0x6368_6861_7264_0001))
    }

    pub fn child(self, index: u64) -> Self {
        SeedPath(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)),
        ))
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

pub fn rng_from(path: SeedPath) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(path.0)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn children_are_distinct_and_stable() {
        let root = SeedPath::root(7);
        let kids: HashSet<u64> = (0..10_000).map(|i| root.child(i).value()).collect();
        assert_eq!(kids.len(), 10_000);
        assert_eq!(root.child(3), SeedPath::root(7).child(3));
        assert_ne!(root.child(3).child(0), root.child(0).child(3));
    }
}
