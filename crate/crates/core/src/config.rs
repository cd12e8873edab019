//! Run-wide budgets and the deterministic seed tree.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Budgets shared by the sampling oracles and the point counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budgets {
    /// Candidate subspace tuples visited per point-counting call.
    pub enumeration_cap: u64,
    /// Samples per prime for the Schur and Ext oracles.
    pub oracle_samples: usize,
    /// Primes the oracles sample over.
    pub oracle_primes: Vec<u64>,
    /// Full generic-representative attempts before giving up.
    pub retry_limit: usize,
    /// Independently accepted samples that must agree on the character.
    pub agreement: usize,
    /// Attempts when sampling a single Schur summand.
    pub summand_attempts: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            enumeration_cap: 10_000_000,
            oracle_samples: 12,
            oracle_primes: vec![101, 103],
            retry_limit: 8,
            agreement: 3,
            summand_attempts: 64,
        }
    }
}

/// Primes `>= 5` used for point counting, in increasing order.
pub fn default_prime_pool() -> Vec<u64> {
    (5u64..200).filter(|&n| crate::linalg::is_prime(n)).collect()
}

/// Everything a computation needs besides its mathematical input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub seed: u64,
    pub prime_pool: Vec<u64>,
    pub budgets: Budgets,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            prime_pool: default_prime_pool(),
            budgets: Budgets::default(),
        }
    }
}

impl Config {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn seeds(&self) -> SeedTree {
        SeedTree::new(self.seed)
    }
}

/// Splittable seed: children are derived by mixing the parent with a label,
/// so independent computations never share a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedTree(u64);

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn child(self, label: u64) -> Self {
        Self(splitmix(self.0 ^ splitmix(label.wrapping_add(0x9E37_79B9_7F4A_7C15))))
    }

    /// Child keyed by a string label.
    pub fn named(self, label: &str) -> Self {
        let h = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        self.child(h)
    }

    /// Child keyed by a vector of integers.
    pub fn keyed(self, key: &[i64]) -> Self {
        key.iter().fold(self, |s, &k| s.child(k as u64))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
