//! Deterministic seed derivation for independent random streams.
//!
//! Every stochastic component takes a single `u64` seed and derives
//! per-purpose substreams through [`derive_seed`], so results never depend
//! on evaluation order or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; full-period bijection on u64.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives a substream seed from a master seed and a stream tag.
/// Distinct tags give statistically independent streams.
pub(crate) fn derive_seed(master: u64, tag: u64) -> u64 {
    splitmix64(master ^ splitmix64(tag))
}

/// Two-level derivation for (tag, index) substreams.
pub(crate) fn derive_seed2(master: u64, tag: u64, index: u64) -> u64 {
    derive_seed(derive_seed(master, tag), index)
}

/// Standard generator for all simulation randomness in this crate.
pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
