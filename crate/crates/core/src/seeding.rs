//! Deterministic seed derivation.
//!
//! Every source of randomness in the crate is keyed off a caller-supplied
//! seed through [`derive_seed`], so repeated runs with the same seed are
//! bit-identical and independent streams (per evaluation, per bench cell,
//! per repetition) never alias each other.

/// SplitMix64 finalizer; full 64-bit avalanche.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a path of stream indices.
///
/// The derivation is stable across platforms and releases; generated
/// instances and experiment sweeps depend on it for reproducibility.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut z = mix(master ^ 0x517c_c1b7_2722_0a95);
    for &word in path {
        z = mix(z ^ mix(word));
    }
    z
}
