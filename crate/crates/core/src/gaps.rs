//! Small gaps: the smallest ratio of consecutive terms and the counts that
//! bound it.
//!
//! Ratios are kept as exact fractions `p/q` (`p = a_{k+1}`, `q = a_k`) and all
//! interval tests are done by cross-multiplication in `u128`.

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::sequence::UlamSequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GapError {
    #[error("index {n} out of range: need {min} <= n < {len}")]
    OutOfRange { n: usize, min: usize, len: usize },
    #[error("ratio {p}/{q} is not above 1")]
    BadRatio { p: u64, q: u64 },
}

/// `a_{k+1} / a_k` at the minimising `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapRatio {
    pub p: u64,
    pub q: u64,
    /// Smallest minimising index.
    pub k: usize,
}

impl GapRatio {
    /// Ratio `p/q` with `p > q > 0`, not tied to any index.
    pub fn new(p: u64, q: u64) -> Result<Self, GapError> {
        if q == 0 || p <= q {
            return Err(GapError::BadRatio { p, q });
        }
        Ok(Self { p, q, k: 0 })
    }

    pub fn ratio(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `ratio - 1`, computed from the difference to keep digits.
    pub fn delta(&self) -> f64 {
        (self.p - self.q) as f64 / self.q as f64
    }

    /// `self > p/q`, exactly.
    fn exceeds(&self, p: u64, q: u64) -> bool {
        (self.p as u128) * (q as u128) > (p as u128) * (self.q as u128)
    }
}

fn check_range(seq: &UlamSequence, n: usize, min: usize) -> Result<(), GapError> {
    if n < min || n >= seq.len() {
        return Err(GapError::OutOfRange { n, min, len: seq.len() });
    }
    Ok(())
}

/// Exact minimum of `a_{k+1}/a_k` over `1 <= k <= n`.
pub fn min_gap_ratio(seq: &UlamSequence, n: usize) -> Result<GapRatio, GapError> {
    check_range(seq, n, 1)?;
    let t = seq.terms();
    let mut best = GapRatio { p: t[1], q: t[0], k: 1 };
    for k in 2..=n {
        let (p, q) = (t[k], t[k - 1]);
        if best.exceeds(p, q) {
            best = GapRatio { p, q, k };
        }
    }
    Ok(best)
}

/// Minimum ratio for every prefix `n = 1..len-1` in one pass. Entry `n-1` is
/// `min_gap_ratio(seq, n)`.
pub fn running_min_gap(seq: &UlamSequence) -> Vec<GapRatio> {
    let t = seq.terms();
    let mut out = Vec::with_capacity(t.len().saturating_sub(1));
    let mut best = GapRatio { p: t[1], q: t[0], k: 1 };
    out.push(best);
    for k in 2..t.len() {
        let (p, q) = (t[k], t[k - 1]);
        if best.exceeds(p, q) {
            best = GapRatio { p, q, k };
        }
        out.push(best);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TailCount {
    pub ell: u64,
    /// `#{k <= n : a_k >= a_n / r^ell}`
    pub count: usize,
    pub bound: u64,
}

impl TailCount {
    pub fn holds(&self) -> bool {
        self.count as u64 <= self.bound
    }
}

/// Largest bit length for which a near-tie is settled with big integers.
const EXACT_BITS: f64 = 1_048_576.0;

/// Smallest `ell >= 0` with `a_k * p^ell >= a_n * q^ell`. The float estimate
/// is off by far less than `1e-9 * ell`; only estimates that close to an
/// integer are settled exactly.
fn threshold_index(ak: u64, an: u64, r: &GapRatio) -> u64 {
    if ak >= an {
        return 0;
    }
    let x = ((an as f64).ln() - (ak as f64).ln()) / r.delta().ln_1p();
    let nearest = x.round();
    if (x - nearest).abs() > 1e-9 * x.max(1.0) || nearest * (r.p as f64).log2() > EXACT_BITS {
        return x.ceil().max(1.0) as u64;
    }
    let e = nearest as u32;
    let reached = BigUint::from(ak) * BigUint::from(r.p).pow(e) >= BigUint::from(an) * BigUint::from(r.q).pow(e);
    if reached {
        nearest as u64
    } else {
        nearest as u64 + 1
    }
}

/// Counts `#{k <= n : a_k >= a_n / r^ell}` against `ell + 1`, where `r` is the
/// smallest ratio up to `n`. The count is a step function of `ell`, so it is
/// reported at `ell = 0` and at each `ell` where it changes; between those
/// points the bound only grows. The last entry is the first `ell` that takes
/// in `a_1`.
pub fn tail_count_check(seq: &UlamSequence, n: usize) -> Result<Vec<TailCount>, GapError> {
    check_range(seq, n, 3)?;
    let r = min_gap_ratio(seq, n)?;
    Ok(tail_counts_with(seq, n, &r))
}

pub fn tail_counts_with(seq: &UlamSequence, n: usize, r: &GapRatio) -> Vec<TailCount> {
    let t = &seq.terms()[..n];
    let an = t[n - 1];
    let mut out = vec![TailCount { ell: 0, count: 1, bound: 1 }];
    // thresholds grow as k falls; several terms may join at the same ell
    for (count, &ak) in (2..).zip(t[..n - 1].iter().rev()) {
        let ell = threshold_index(ak, an, r);
        match out.last_mut() {
            Some(last) if last.ell == ell => last.count = count,
            _ => out.push(TailCount { ell, count, bound: ell + 1 }),
        }
    }
    out
}

/// Number of pairs `j < k <= n` with `a_j + a_k <= limit`.
fn pairs_at_most(t: &[u64], limit: u128) -> u64 {
    let mut count = 0u64;
    let (mut i, mut k) = (0usize, t.len().saturating_sub(1));
    while i < k {
        if (t[i] as u128) + (t[k] as u128) <= limit {
            count += (k - i) as u64;
            i += 1;
        } else {
            k -= 1;
        }
    }
    count
}

/// Pairs `j < k <= n` with `a_n <= a_j + a_k <= (1 + delta/2) a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockingPairs {
    pub count: u64,
    /// `(2 ln 2)/delta + (4/delta) ln(10/delta)`
    pub analytic_bound: f64,
}

pub fn analytic_blocking_bound(delta: f64) -> f64 {
    2.0 * std::f64::consts::LN_2 / delta + 4.0 / delta * (10.0 / delta).ln()
}

/// Upper end of `[a_n, (1 + delta/2) a_n]` as an integer: `floor((p+q) a_n / 2q)`.
fn half_step_ceiling(an: u64, r: &GapRatio) -> u128 {
    (r.p as u128 + r.q as u128) * an as u128 / (2 * r.q as u128)
}

pub fn blocking_pairs(seq: &UlamSequence, n: usize) -> Result<BlockingPairs, GapError> {
    check_range(seq, n, 3)?;
    let r = min_gap_ratio(seq, n)?;
    Ok(blocking_pairs_with(seq, n, &r))
}

/// As [`blocking_pairs`] with an explicit ratio; `n` may be the full length.
pub fn blocking_pairs_with(seq: &UlamSequence, n: usize, r: &GapRatio) -> BlockingPairs {
    let t = &seq.terms()[..n];
    let an = t[n - 1] as u128;
    let hi = half_step_ceiling(t[n - 1], r);
    let count = pairs_at_most(t, hi) - pairs_at_most(t, an - 1);
    BlockingPairs {
        count,
        analytic_bound: analytic_blocking_bound(r.delta()),
    }
}

/// `#{k <= n : a_n + a_k <= (1 + delta/2) a_n}`, i.e. `2 q a_k <= (p - q) a_n`.
pub fn candidate_sums(seq: &UlamSequence, n: usize, r: &GapRatio) -> u64 {
    let t = &seq.terms()[..n];
    let rhs = (r.p - r.q) as u128 * t[n - 1] as u128;
    t.partition_point(|&a| 2 * r.q as u128 * a as u128 <= rhs) as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub ratio: GapRatio,
    pub delta: f64,
    pub c: f64,
    /// `c ln(n) / n`
    pub rhs: f64,
    pub verdict: bool,
    pub blocking_pairs: u64,
    pub analytic_blocking_bound: f64,
    pub candidate_sums: u64,
    pub tail_counts: Vec<TailCount>,
    pub tails_hold: bool,
    /// `n - (2/delta) ln(2/delta) - 1`
    pub chain_lhs: f64,
}

pub fn gap_report(seq: &UlamSequence, grid: &[usize], c: f64) -> Result<Vec<GapReport>, GapError> {
    for &n in grid {
        check_range(seq, n, 3)?;
    }
    let mins = running_min_gap(seq);
    Ok(grid
        .iter()
        .map(|&n| {
            let ratio = mins[n - 1];
            let delta = ratio.delta();
            let rhs = c * (n as f64).ln() / n as f64;
            let x = blocking_pairs_with(seq, n, &ratio);
            let tails = tail_counts_with(seq, n, &ratio);
            GapReport {
                n,
                ratio,
                delta,
                c,
                rhs,
                verdict: delta <= rhs,
                blocking_pairs: x.count,
                analytic_blocking_bound: x.analytic_bound,
                candidate_sums: candidate_sums(seq, n, &ratio),
                tails_hold: tails.iter().all(TailCount::holds),
                tail_counts: tails,
                chain_lhs: n as f64 - 2.0 / delta * (2.0 / delta).ln() - 1.0,
            }
        })
        .collect())
}

/// Powers of 10 and of 2 in `[3, len)`, ascending.
pub fn default_grid(len: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    for base in [2usize, 10] {
        let mut v = base;
        while v < len {
            if v >= 3 {
                grid.push(v);
            }
            v = match v.checked_mul(base) {
                Some(next) => next,
                None => break,
            };
        }
    }
    grid.sort_unstable();
    grid.dedup();
    grid
}
