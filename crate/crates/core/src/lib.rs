//! Non-adaptive group testing with left-and-right-regular sparse-graph codes.
//!
//! Items are hashed into bins by a bipartite graph whose left and right
//! degrees are both fixed. Each bin runs `h` tests drawn from a signature
//! matrix whose columns carry the binary expansion of a slot index (and its
//! complement) over several independently permuted sections. A bin holding a
//! single defective therefore reveals that defective's slot directly, and the
//! peeling decoder uses every identified defective to resolve the bins where
//! it collides with exactly one other.
//!
//! Module map:
//!
//! * [`graph`] samples and queries the pooling graph (explicit, Feistel-backed
//!   and left-regular baseline backends).
//! * [`signature`] builds the per-bin signature matrix, optionally coded.
//! * [`ecc`] provides the binary codes used by the robust signature.
//! * [`encoder`] assembles testing schemes and produces measurements.
//! * [`decoder`] holds the bin decoders, peeling and singleton-only decoding.
//! * [`analysis`] runs density evolution and the test-count calculators.
//! * [`harness`] runs seeded Monte Carlo sweeps and writes CSV.

pub mod analysis;
pub mod decoder;
pub mod ecc;
pub mod encoder;
pub mod error;
pub mod graph;
pub mod harness;
pub mod perm;
pub mod signature;

pub use error::{Error, Result};
