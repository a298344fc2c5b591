//! Growth bounds from constrained products of the three step matrices.

pub mod matrix;
pub mod norm;
pub mod periodic;
pub mod search;
pub mod spectral;

use serde::Serialize;

use crate::sequence::UlamSequence;

pub use matrix::{matrix_product, step_matrix, Letter, ProductOverflow, StepMatrix, Word};
pub use norm::{operator_norm, NormError, NormKind};
pub use periodic::{periodic_estimate, periodic_lower_bound, SpectralEstimate, SpectralMethod};
pub use search::{admissible_count, best_bound, enumerate_admissible, BoundResult, SearchError, SearchOptions};
pub use spectral::{characteristic_polynomial, gelfand_estimate, spectral_radius};

/// Result of checking `a_n <= base^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthVerdict {
    pub base: f64,
    pub start: usize,
    pub checked: usize,
    /// Every index that broke the bound, ascending.
    pub violations: Vec<usize>,
}

impl GrowthVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<usize> {
        self.violations.first().copied()
    }
}

/// Checks `a_n <= base^n` for every `n >= start` (1-based) in the sequence.
pub fn growth_check(seq: &UlamSequence, base: f64, start: usize) -> GrowthVerdict {
    let start = start.max(1);
    let mut violations = Vec::new();
    let mut checked = 0;
    for n in start..=seq.len() {
        checked += 1;
        let cap = i32::try_from(n).map_or(f64::INFINITY, |e| base.powi(e));
        if seq.term(n) as f64 > cap {
            violations.push(n);
        }
    }
    GrowthVerdict {
        base,
        start,
        checked,
        violations,
    }
}
