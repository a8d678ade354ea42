//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha20 keystream selected
//! by `(seed, domain, index)`:
//!
//! - the 256-bit key is the little-endian `seed` followed by 24 zero bytes;
//! - the 64-bit stream id is `domain << 48 | index` (so `index < 2^48`);
//! - the block counter starts at zero.
//!
//! ChaCha is counter-based, so a stream is a pure function of those three
//! values. Work that is split across threads takes one stream per unit of
//! work (a Monte Carlo block, a trial, a restart), never per thread, which
//! keeps results independent of the worker count. Normal variates use
//! `rand_distr::StandardNormal` (ziggurat), pinned by the crate versions in
//! `Cargo.toml`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub use rand_chacha::ChaCha20Rng as StreamRng;

/// Stream domains. Values are part of the reproducibility contract and must
/// never be renumbered.
pub mod domain {
    pub const SPACE: u16 = 1;
    pub const VOLUME: u16 = 2;
    pub const LEMMA7: u16 = 3;
    pub const DISTANCE: u16 = 4;
    pub const AXIOMS: u16 = 5;
    pub const ENVELOPE: u16 = 6;
    pub const DERIVE: u16 = 7;
    pub const SAMPLES: u16 = 8;
}

const INDEX_BITS: u32 = 48;

/// The generator for `(seed, domain, index)`.
pub fn stream(seed: u64, domain: u16, index: u64) -> StreamRng {
    assert!(index < 1 << INDEX_BITS, "stream index {index} exceeds 48 bits");
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(((domain as u64) << INDEX_BITS) | index);
    rng
}

/// A child seed for sub-experiment `index` of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    stream(seed, domain::DERIVE, index).next_u64()
}

/// Vector of independent standard normal variates.
pub fn normal_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}
