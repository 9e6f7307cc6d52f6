//! Ground-truth generators: finite-order Markov chains with exact
//! conditional entropies, and approximate finite-range lattice fields.
//!
//! All randomness comes from ChaCha8 streams seeded with a `u64`; trial `i`
//! of a sweep uses [`derive_seed`]`(base, i)`.

mod lattice;
mod markov;

pub use lattice::{sample_lattice, LatticeModel};
pub use markov::{
    random_kernel, sample_markov, stationary_distribution, theoretical_entropies, Concentration, MarkovModel,
    DEFAULT_BUDGET,
};

/// SplitMix64 finalizer applied to `base + (index + 1) * golden_gamma`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_fixed_and_distinct() {
        // SplitMix64 reference output for state 0 after one increment.
        assert_eq!(derive_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
