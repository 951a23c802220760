use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mersenne prime 2^61 - 1.
pub const PRIME: u64 = (1 << 61) - 1;

/// 2-wise independent hash `j ↦ ((a·j + b) mod p) mod range`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashFamily {
    a: u64,
    b: u64,
    range: u64,
    seed: u64,
}

impl HashFamily {
    pub fn new(seed: u64, range: usize) -> Self {
        assert!(range >= 1, "hash range must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        HashFamily {
            a: rng.gen_range(1..PRIME),
            b: rng.gen_range(0..PRIME),
            range: range as u64,
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn range(&self) -> usize {
        self.range as usize
    }

    fn raw(&self, j: u64) -> u64 {
        let x = (self.a as u128) * (j as u128 % PRIME as u128) + self.b as u128;
        (x % PRIME as u128) as u64
    }

    /// Bucket in `[0, range)`.
    pub fn bucket(&self, j: usize) -> usize {
        (self.raw(j as u64) % self.range) as usize
    }

    /// Rademacher sign; only meaningful for a family built with range 2.
    pub fn sign(&self, j: usize) -> f64 {
        if self.raw(j as u64).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

/// Bucket and sign hashes for one table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashPair {
    pub bucket: HashFamily,
    pub sign: HashFamily,
}

impl HashPair {
    pub fn new(seed: u64, k: usize) -> Self {
        HashPair {
            bucket: HashFamily::new(splitmix(seed ^ 0xb0c4e7), k),
            sign: HashFamily::new(splitmix(seed ^ 0x5167), 2),
        }
    }
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn splitmix(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
