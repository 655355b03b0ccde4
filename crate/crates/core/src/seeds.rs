//! Deterministic 64-bit seed derivation.
//!
//! Every randomized step in the toolkit draws from a ChaCha stream whose seed
//! is derived here. The rule is fixed: fold each key field into a SplitMix64
//! chain. Identical inputs give identical seeds on every platform.

/// SplitMix64 finalizer (Steele et al.). Bijective on u64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `base`, one field at a time.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(base ^ 0x9E37_79B9_7F4A_7C15);
    for &part in parts {
        state = splitmix64(state ^ splitmix64(part));
    }
    state
}
