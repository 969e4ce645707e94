//! Seeded permutations of `[0, n)`.
//!
//! Two representations share one interface: a materialized table (with its
//! inverse) sampled by Fisher-Yates, and a keyed Feistel network that is
//! evaluated on demand. The Feistel form never allocates, which is what makes
//! graphs with tens of billions of edges usable.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix two words into one seed. Used wherever a child stream is derived from
/// a parent seed and an index.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

const FEISTEL_ROUNDS: usize = 4;

/// Balanced 4-round Feistel network over `[0, 2^(2·half_bits))`, restricted to
/// `[0, domain)` by cycle walking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeistelPermutation {
    domain: u64,
    half_bits: u32,
    keys: [u64; FEISTEL_ROUNDS],
}

impl FeistelPermutation {
    pub fn new(domain: u64, seed: u64) -> Self {
        // Smallest even bit width covering the domain. The covering block is
        // below 4·domain, so cycle walking takes fewer than 4 steps on average.
        let bits = if domain <= 1 {
            2
        } else {
            let b = 64 - (domain - 1).leading_zeros();
            b + (b & 1)
        };
        assert!(bits <= 64, "Feistel domain too large");
        let mut keys = [0u64; FEISTEL_ROUNDS];
        for (i, k) in keys.iter_mut().enumerate() {
            *k = mix_seed(seed, i as u64);
        }
        FeistelPermutation {
            domain,
            half_bits: bits / 2,
            keys,
        }
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    #[inline]
    fn mask(&self) -> u64 {
        if self.half_bits == 32 {
            u32::MAX as u64
        } else {
            (1u64 << self.half_bits) - 1
        }
    }

    #[inline]
    fn round(&self, half: u64, key: u64) -> u64 {
        splitmix64(half ^ key) & self.mask()
    }

    #[inline]
    fn encrypt(&self, x: u64) -> u64 {
        let mask = self.mask();
        let mut left = x >> self.half_bits;
        let mut right = x & mask;
        for &k in &self.keys {
            let next = left ^ self.round(right, k);
            left = right;
            right = next;
        }
        (left << self.half_bits) | right
    }

    #[inline]
    fn decrypt(&self, x: u64) -> u64 {
        let mask = self.mask();
        let mut left = x >> self.half_bits;
        let mut right = x & mask;
        for &k in self.keys.iter().rev() {
            let prev = right ^ self.round(left, k);
            right = left;
            left = prev;
        }
        (left << self.half_bits) | right
    }

    pub fn forward(&self, x: u64) -> u64 {
        debug_assert!(x < self.domain);
        let mut y = self.encrypt(x);
        while y >= self.domain {
            y = self.encrypt(y);
        }
        y
    }

    pub fn inverse(&self, y: u64) -> u64 {
        debug_assert!(y < self.domain);
        let mut x = self.decrypt(y);
        while x >= self.domain {
            x = self.decrypt(x);
        }
        x
    }
}

/// A materialized permutation with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TablePermutation {
    forward: Vec<u64>,
    inverse: Vec<u64>,
}

impl TablePermutation {
    /// Uniform permutation by Fisher-Yates shuffle.
    pub fn sample(n: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut forward: Vec<u64> = (0..n).collect();
        forward.shuffle(&mut rng);
        Self::from_forward_unchecked(forward)
    }

    /// Build from an explicit image table; `None` unless it is a bijection.
    pub fn from_forward(forward: Vec<u64>) -> Option<Self> {
        let n = forward.len();
        let mut seen = vec![false; n];
        for &y in &forward {
            let y = usize::try_from(y).ok()?;
            if y >= n || seen[y] {
                return None;
            }
            seen[y] = true;
        }
        Some(Self::from_forward_unchecked(forward))
    }

    fn from_forward_unchecked(forward: Vec<u64>) -> Self {
        let mut inverse = vec![0u64; forward.len()];
        for (x, &y) in forward.iter().enumerate() {
            inverse[y as usize] = x as u64;
        }
        TablePermutation { forward, inverse }
    }

    pub fn len(&self) -> u64 {
        self.forward.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    #[inline]
    pub fn forward(&self, x: u64) -> u64 {
        self.forward[x as usize]
    }

    #[inline]
    pub fn inverse(&self, y: u64) -> u64 {
        self.inverse[y as usize]
    }
}

/// Any of the supported permutation representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Permutation {
    Identity(u64),
    Table(TablePermutation),
    Feistel(FeistelPermutation),
}

impl Permutation {
    pub fn len(&self) -> u64 {
        match self {
            Permutation::Identity(n) => *n,
            Permutation::Table(t) => t.len(),
            Permutation::Feistel(f) => f.domain(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn forward(&self, x: u64) -> u64 {
        match self {
            Permutation::Identity(_) => x,
            Permutation::Table(t) => t.forward(x),
            Permutation::Feistel(f) => f.forward(x),
        }
    }

    #[inline]
    pub fn inverse(&self, y: u64) -> u64 {
        match self {
            Permutation::Identity(_) => y,
            Permutation::Table(t) => t.inverse(y),
            Permutation::Feistel(f) => f.inverse(y),
        }
    }
}
