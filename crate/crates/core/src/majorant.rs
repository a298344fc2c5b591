//! The dominating sequence `b_n`: copy `a_1..a_5`, then replay each step
//! with the Eggleton, Type I or Type II recursion on `b` itself.
//!
//! `b_n` grows exponentially while `a_n` grows roughly linearly, so `b`
//! leaves 64-bit range after ~150 terms. The recursion runs on exact big
//! integers over a four-term window; per index we keep `log2(b_n)` and the
//! exact value while it still fits in a `u64`.

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::sequence::UlamSequence;
use crate::steps::{StepKind, StepTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Recursion {
    /// `b_{n+1} = b_n + b_{n-2}`
    Eggleton,
    /// `b_{n+1} = b_n + b_{n-3}`
    TypeI,
    /// `b_{n+1} = b_{n-1} + b_{n-2}`
    TypeII,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MajorantError {
    #[error("trace does not line up with the sequence (first index {first_index}, {steps} steps, {terms} terms)")]
    Misaligned {
        first_index: usize,
        steps: usize,
        terms: usize,
    },
    #[error("a_{index} exceeds both a_n + a_(n-3) and a_(n-1) + a_(n-2)")]
    CandidateBoundViolated { index: usize },
    #[error("a_{index} is larger than b_{index}")]
    NotDominated { index: usize },
}

#[derive(Debug, Clone)]
pub struct MajorantSequence {
    /// `log2(b_n)` for `n = 1..`, stored at position `n - 1`.
    log2: Vec<f64>,
    /// `b_1, b_2, ...` up to the last value that fits in a `u64`.
    exact: Vec<u64>,
    /// Recursion used for `b_{n+1}`, starting at `n = 5`.
    choices: Vec<Recursion>,
    /// Last four values, oldest first.
    window: [BigUint; 4],
}

/// Number of leading terms copied verbatim from the sequence.
pub const COPIED_TERMS: usize = 5;

impl MajorantSequence {
    pub fn len(&self) -> usize {
        self.log2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log2.is_empty()
    }

    /// `b_n` when it fits in 64 bits.
    pub fn exact(&self, n: usize) -> Option<u64> {
        self.exact.get(n - 1).copied()
    }

    pub fn log2(&self, n: usize) -> f64 {
        self.log2[n - 1]
    }

    pub fn exact_prefix(&self) -> &[u64] {
        &self.exact
    }

    pub fn choices(&self) -> &[Recursion] {
        &self.choices
    }

    /// The exact final value.
    pub fn last_value(&self) -> &BigUint {
        &self.window[3]
    }

    /// Indices `n >= start` with `b_n > base^n`, compared in log space.
    pub fn growth_violations(&self, base: f64, start: usize) -> Vec<usize> {
        let per_step = base.log2();
        (start.max(1)..=self.len())
            .filter(|&n| self.log2(n) > n as f64 * per_step)
            .collect()
    }

    /// First index where `a_n > b_n`.
    pub fn first_undominated(&self, seq: &UlamSequence) -> Option<usize> {
        (1..=self.len().min(seq.len())).find(|&n| match self.exact(n) {
            Some(b) => seq.term(n) > b,
            // b_n no longer fits in 64 bits, so it exceeds any term.
            None => false,
        })
    }
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        let v = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).iter_u64_digits().next().unwrap_or(0);
    (top as f64).log2() + shift as f64
}

/// Builds `b` from the sequence and its step trace.
///
/// For steps classified as `Other`, Type I is used when
/// `a_n + a_{n-3} >= a_{n+1}` and Type II when `a_{n-1} + a_{n-2} >= a_{n+1}`;
/// when both hold, the one giving the smaller `b_{n+1}`.
pub fn majorant(trace: &StepTrace, seq: &UlamSequence) -> Result<MajorantSequence, MajorantError> {
    let misaligned = || MajorantError::Misaligned {
        first_index: trace.first_index,
        steps: trace.kinds.len(),
        terms: seq.len(),
    };
    if seq.len() < COPIED_TERMS || trace.first_index + trace.kinds.len() != seq.len() || trace.first_index > COPIED_TERMS {
        return Err(misaligned());
    }
    let a = |k: usize| seq.term(k);

    let mut log2 = Vec::with_capacity(seq.len());
    let mut exact = Vec::new();
    for n in 1..=COPIED_TERMS {
        log2.push((a(n) as f64).log2());
        exact.push(a(n));
    }
    let mut window = [BigUint::from(a(2)), BigUint::from(a(3)), BigUint::from(a(4)), BigUint::from(a(5))];
    let mut choices = Vec::with_capacity(seq.len().saturating_sub(COPIED_TERMS));
    let mut fits = true;

    for n in COPIED_TERMS..seq.len() {
        let kind = trace.kind(n).ok_or_else(misaligned)?;
        let choice = match kind {
            StepKind::Eggleton => Recursion::Eggleton,
            StepKind::TypeI => Recursion::TypeI,
            StepKind::TypeII => Recursion::TypeII,
            StepKind::Other { .. } => {
                let next = a(n + 1);
                let type1_ok = a(n) + a(n - 3) >= next;
                let type2_ok = a(n - 1) + a(n - 2) >= next;
                match (type1_ok, type2_ok) {
                    (true, true) => {
                        // window = [b_{n-3}, b_{n-2}, b_{n-1}, b_n]
                        if &window[3] + &window[0] <= &window[2] + &window[1] {
                            Recursion::TypeI
                        } else {
                            Recursion::TypeII
                        }
                    }
                    (true, false) => Recursion::TypeI,
                    (false, true) => Recursion::TypeII,
                    (false, false) => return Err(MajorantError::CandidateBoundViolated { index: n + 1 }),
                }
            }
        };
        let next = match choice {
            Recursion::Eggleton => &window[3] + &window[1],
            Recursion::TypeI => &window[3] + &window[0],
            Recursion::TypeII => &window[2] + &window[1],
        };
        log2.push(log2_big(&next));
        if fits {
            match u64::try_from(&next) {
                Ok(v) => exact.push(v),
                Err(_) => fits = false,
            }
        }
        window.rotate_left(1);
        window[3] = next;
        choices.push(choice);
    }

    let result = MajorantSequence {
        log2,
        exact,
        choices,
        window,
    };
    if let Some(index) = result.first_undominated(seq) {
        return Err(MajorantError::NotDominated { index });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{generate_fast, GenerationConfig};
    use crate::steps::classify_steps;

    fn build(n: usize) -> (UlamSequence, MajorantSequence) {
        let seq = generate_fast(GenerationConfig::count(n)).unwrap();
        let trace = classify_steps(&seq).unwrap();
        let b = majorant(&trace, &seq).unwrap();
        (seq, b)
    }

    #[test]
    fn copies_first_five_terms() {
        let (_, b) = build(5);
        assert_eq!(b.exact_prefix(), [1, 2, 3, 4, 6]);
        assert!(b.choices().is_empty());
    }

    #[test]
    fn small_prefix_by_hand() {
        // a = 1 2 3 4 6 8 11 13; steps n=5,6 are Type I, n=7 is Other.
        // b_6 = b_5 + b_2 = 8, b_7 = b_6 + b_3 = 11,
        // n=7: a_8 = 13 <= a_7 + a_4 = 15 and <= a_6 + a_5 = 14;
        // Type I gives 11 + 4 = 15, Type II gives 8 + 6 = 14 -> 14.
        let (_, b) = build(8);
        assert_eq!(b.exact_prefix(), [1, 2, 3, 4, 6, 8, 11, 14]);
        assert_eq!(b.choices(), [Recursion::TypeI, Recursion::TypeI, Recursion::TypeII]);
    }

    #[test]
    fn dominates_and_leaves_u64() {
        let (seq, b) = build(1000);
        assert_eq!(b.len(), 1000);
        assert_eq!(b.first_undominated(&seq), None);
        assert!(b.exact_prefix().len() < 1000);
        for (n, &v) in b.exact_prefix().iter().enumerate() {
            assert!(seq.term(n + 1) <= v);
            assert!((b.log2(n + 1) - (v as f64).log2()).abs() < 1e-12);
        }
        assert!(b.growth_violations(1.454, 1).is_empty());
        assert!((b.log2(1000) - log2_big(b.last_value())).abs() < 1e-9);
    }

    #[test]
    fn big_log2_matches_float_route() {
        let x = BigUint::from(3u32).pow(200);
        assert!((log2_big(&x) - 200.0 * 3f64.log2()).abs() < 1e-9);
        assert_eq!(log2_big(&BigUint::from(1024u32)), 10.0);
    }

    #[test]
    fn rejects_lists_above_both_candidates() {
        let seq = UlamSequence::from_terms(vec![1, 2, 3, 4, 6, 8, 20]).unwrap();
        let trace = classify_steps(&seq).unwrap();
        assert_eq!(majorant(&trace, &seq).unwrap_err(), MajorantError::CandidateBoundViolated { index: 7 });
    }

    #[test]
    fn rejects_misaligned_trace() {
        let (seq, _) = build(20);
        let trace = classify_steps(&seq.prefix(15).unwrap()).unwrap();
        assert!(matches!(majorant(&trace, &seq), Err(MajorantError::Misaligned { .. })));
    }
}
