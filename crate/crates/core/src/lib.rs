//! Ulam sequence generation and the analyses built on it: step types and the
//! lemmas about them, growth bounds from products of step matrices, small
//! gaps, and the hidden frequency of `alpha * a_n mod 2pi`.

pub mod cache;
pub mod gaps;
pub mod growth;
pub mod majorant;
pub mod sequence;
pub mod signal;
pub mod steps;

pub use gaps::{
    blocking_pairs, candidate_sums, default_grid, gap_report, min_gap_ratio, tail_count_check, GapError, GapRatio,
    GapReport, TailCount,
};
pub use growth::{
    best_bound, growth_check, periodic_lower_bound, BoundResult, GrowthVerdict, Letter, NormKind, SearchOptions,
    SpectralEstimate, StepMatrix, Word,
};
pub use majorant::{majorant, MajorantSequence};
pub use sequence::{generate_fast, generate_oracle, GenerationConfig, SequenceError, Target, UlamSequence};
pub use signal::{residue_histogram, scan, signal_statistic, ResidueHistogram, SignalScanResult};
pub use steps::{check_eggleton, classify_steps, verify_lemmas, LemmaReport, StepKind, StepTrace};
