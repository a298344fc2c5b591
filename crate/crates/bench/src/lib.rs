//! Shared inputs for the benchmarks.

use std::sync::OnceLock;

use ulam_core::{generate_fast, GenerationConfig, UlamSequence};

/// Ulam(1, 2) with `n` terms, generated once per process for the common sizes.
pub fn fixture(n: usize) -> UlamSequence {
    static TEN_THOUSAND: OnceLock<UlamSequence> = OnceLock::new();
    if n == 10_000 {
        return TEN_THOUSAND
            .get_or_init(|| generate_fast(GenerationConfig::count(n)).expect("generation"))
            .clone();
    }
    generate_fast(GenerationConfig::count(n)).expect("generation")
}
