//! The exponential sum `S(alpha) = |sum_n exp(i alpha a_n)| / N`.
//!
//! Phases are reduced mod 2pi from an exact product `alpha * a_n` (FMA
//! two-product) against a double-double 2pi. A uniform grid of `alpha` is
//! evaluated in one chirp-z transform of the indicator of the terms; the best
//! grid point is then refined by golden-section search on the direct sum.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

use crate::sequence::UlamSequence;

/// `2pi = TAU + TAU_LO` to about 107 bits.
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Golden-section search stops once the bracket is this narrow.
pub const REFINE_WIDTH: f64 = 1e-9;

/// Largest chirp-z convolution the scan will allocate (complex points). Also
/// keeps every squared chirp index below 2^53.
pub const MAX_TRANSFORM_LEN: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("need 0 <= alpha_min < alpha_max <= pi, got [{0}, {1}]")]
    Range(f64, f64),
    #[error("need at least 2 grid points, got {0}")]
    TooFewPoints(usize),
    #[error("need at least 1 bin")]
    NoBins,
    #[error("scan needs a transform of {0} points, above the limit of {MAX_TRANSFORM_LEN}")]
    TooLarge(usize),
}

/// `alpha * x mod 2pi` in `[0, 2pi)`; exact input needs `x < 2^53`.
pub fn reduce_phase(alpha: f64, x: u64) -> f64 {
    let xf = x as f64;
    let hi = alpha * xf;
    let lo = alpha.mul_add(xf, -hi);
    let k = (hi / TAU).floor();
    let mut r = k.mul_add(-TAU, hi);
    r = k.mul_add(-TAU_LO, r) + lo;
    if r < 0.0 {
        r += TAU;
    } else if r >= TAU {
        r -= TAU;
    }
    r.clamp(0.0, TAU.next_down())
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `|sum exp(i alpha a)| / len` over the given values.
pub fn statistic_of(terms: &[u64], alpha: f64) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    for &a in terms {
        let (s, c) = reduce_phase(alpha, a).sin_cos();
        re.add(c);
        im.add(s);
    }
    (re.value().hypot(im.value()) / terms.len() as f64).min(1.0)
}

pub fn signal_statistic(seq: &UlamSequence, alpha: f64) -> f64 {
    statistic_of(seq.terms(), alpha)
}

/// Widest grid spacing that cannot step over the main lobe of a peak.
pub fn nyquist_spacing(largest: u64) -> f64 {
    1.0 / (4.0 * largest as f64)
}

/// Grid points needed on `[alpha_min, alpha_max]` to respect [`nyquist_spacing`].
pub fn nyquist_points(largest: u64, alpha_min: f64, alpha_max: f64) -> usize {
    ((alpha_max - alpha_min) / nyquist_spacing(largest)).ceil() as usize + 1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalScanResult {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub points: usize,
    pub n: usize,
    /// `S` at `alpha_min + i * spacing`.
    pub values: Vec<f64>,
    pub spacing: f64,
    /// True when `spacing` exceeds [`nyquist_spacing`] for the largest term.
    pub coarse: bool,
    pub alpha_star: f64,
    pub s_star: f64,
}

impl SignalScanResult {
    pub fn alpha(&self, i: usize) -> f64 {
        self.alpha_min + i as f64 * self.spacing
    }

    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &s)| (self.alpha(i), s))
    }
}

/// `sum_m x_m exp(i (alpha_min + j h) m)` for `j < points`, where `x` is the
/// indicator of `terms`, by Bluestein's identity
/// `jm = (j^2 + m^2 - (j - m)^2) / 2`.
fn chirp_z(terms: &[u64], alpha_min: f64, h: f64, points: usize) -> Result<Vec<Complex64>, SignalError> {
    let m_len = *terms.last().unwrap() as usize + 1;
    let conv = m_len + points - 1;
    let len = conv.checked_next_power_of_two().unwrap_or(usize::MAX);
    if len > MAX_TRANSFORM_LEN {
        return Err(SignalError::TooLarge(len));
    }
    let half = 0.5 * h;
    let chirp = |k: usize| {
        let (s, c) = reduce_phase(half, (k as u64) * (k as u64)).sin_cos();
        Complex64::new(c, s)
    };

    let mut u = vec![Complex64::new(0.0, 0.0); len];
    for &a in terms {
        let m = a as usize;
        let theta = reduce_phase(alpha_min, a) + reduce_phase(half, a * a);
        let (s, c) = theta.sin_cos();
        u[m] = Complex64::new(c, s);
    }
    let mut v = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..points.max(m_len) {
        let c = chirp(k).conj();
        if k < points {
            v[k] = c;
        }
        if k > 0 && k < m_len {
            v[len - k] = c;
        }
    }

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);
    forward.process(&mut u);
    forward.process(&mut v);
    for (a, b) in u.iter_mut().zip(&v) {
        *a *= *b;
    }
    inverse.process(&mut u);
    let scale = 1.0 / len as f64;
    Ok((0..points).map(|j| chirp(j) * u[j] * scale).collect())
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > REFINE_WIDTH {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Evaluates `S` on `points` equally spaced values in `[alpha_min, alpha_max]`
/// and refines the largest one.
pub fn scan(seq: &UlamSequence, alpha_min: f64, alpha_max: f64, points: usize) -> Result<SignalScanResult, SignalError> {
    if !(0.0 <= alpha_min && alpha_min < alpha_max && alpha_max <= PI) {
        return Err(SignalError::Range(alpha_min, alpha_max));
    }
    if points < 2 {
        return Err(SignalError::TooFewPoints(points));
    }
    let terms = seq.terms();
    let n = terms.len();
    let h = (alpha_max - alpha_min) / (points - 1) as f64;
    let sums = chirp_z(terms, alpha_min, h, points)?;
    let values: Vec<f64> = sums.iter().map(|z| (z.norm() / n as f64).min(1.0)).collect();

    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &s)| if s > values[best] { i } else { best });
    let at = |i: usize| alpha_min + i as f64 * h;
    let lo = if best == 0 { alpha_min } else { at(best - 1) };
    let hi = if best + 1 == points { alpha_max } else { at(best + 1) };
    let (mut alpha_star, mut s_star) = golden_max(|x| statistic_of(terms, x), lo, hi);
    let grid_best = statistic_of(terms, at(best));
    if grid_best > s_star {
        alpha_star = at(best);
        s_star = grid_best;
    }

    Ok(SignalScanResult {
        alpha_min,
        alpha_max,
        points,
        n,
        values,
        spacing: h,
        coarse: h > nyquist_spacing(*terms.last().unwrap()),
        alpha_star,
        s_star,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueHistogram {
    pub alpha: f64,
    pub bins: usize,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl ResidueHistogram {
    /// `[low, high)` of bin `i` within `[0, 2pi)`.
    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = TAU / self.bins as f64;
        (i as f64 * w, (i + 1) as f64 * w)
    }
}

/// Histogram of `alpha * a_n mod 2pi` over `bins` equal bins.
pub fn residue_histogram(seq: &UlamSequence, alpha: f64, bins: usize) -> Result<ResidueHistogram, SignalError> {
    if bins == 0 {
        return Err(SignalError::NoBins);
    }
    let mut counts = vec![0u64; bins];
    for &a in seq.terms() {
        let b = (reduce_phase(alpha, a) / TAU * bins as f64) as usize;
        counts[b.min(bins - 1)] += 1;
    }
    Ok(ResidueHistogram {
        alpha,
        bins,
        counts,
        total: seq.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{generate_fast, GenerationConfig};

    fn ulam(n: usize) -> UlamSequence {
        generate_fast(GenerationConfig::count(n)).unwrap()
    }

    #[test]
    fn tau_split() {
        // TAU_LO is the rounding error of TAU; check it against 2 * (PI_hi + PI_lo)
        assert_eq!(TAU, 2.0 * PI);
        assert!((TAU_LO - 2.0 * 1.224_646_799_147_353_2e-16).abs() < 1e-31);
    }

    #[test]
    fn phase_reduction() {
        assert_eq!(reduce_phase(0.0, 12345), 0.0);
        assert!((reduce_phase(1.0, 7) - 0.716_814_692_820_413_5).abs() < 1e-15);
        // 10^9 mod 2pi from a 50-digit evaluation
        assert!((reduce_phase(1.0, 1_000_000_000) - 0.577_395_423_501_385_2).abs() < 1e-9);
        let r = reduce_phase(TAU, 1_000_000);
        assert!(r < 1e-8 || TAU - r < 1e-8);
    }

    #[test]
    fn zero_frequency_is_one() {
        let s = ulam(1000);
        assert_eq!(signal_statistic(&s, 0.0), 1.0);
    }

    #[test]
    fn mirror_symmetry() {
        let s = ulam(2000);
        for alpha in [0.3, 1.0, 2.5714, 3.0] {
            let d = signal_statistic(&s, alpha) - signal_statistic(&s, TAU - alpha);
            assert!(d.abs() < 1e-9, "{alpha}: {d}");
        }
    }

    #[test]
    fn chirp_matches_direct() {
        let s = ulam(500);
        let res = scan(&s, 0.1, PI, 257).unwrap();
        for (alpha, v) in res.grid().step_by(16) {
            assert!((v - signal_statistic(&s, alpha)).abs() < 1e-9, "{alpha}");
        }
        assert!(res.coarse);
    }

    #[test]
    fn finds_the_hidden_frequency() {
        let s = ulam(10_000);
        let points = nyquist_points(s.last(), 0.1, PI);
        let res = scan(&s, 0.1, PI, points).unwrap();
        assert!(!res.coarse);
        assert!((res.alpha_star - 2.5714).abs() < 5e-3, "{}", res.alpha_star);
        assert!(res.s_star > 0.5);
        let max = res.values.iter().cloned().fold(0.0, f64::max);
        assert!(res.s_star >= max - 1e-12);
    }

    #[test]
    fn peak_is_stable_in_n() {
        let big = ulam(10_000);
        let small = big.prefix(1000).unwrap();
        let peak = |s: &UlamSequence| scan(s, 0.1, PI, nyquist_points(s.last(), 0.1, PI)).unwrap().alpha_star;
        assert!((peak(&small) - peak(&big)).abs() < 1e-3);
    }

    #[test]
    fn integers_peak_at_the_left_edge() {
        let s = UlamSequence::from_terms((1..=1000).collect()).unwrap();
        let res = scan(&s, 0.0, PI, 8001).unwrap();
        assert!(res.alpha_star < 1e-3);
        assert!((res.s_star - 1.0).abs() < 1e-6);
    }

    #[test]
    fn argument_checks() {
        let s = ulam(100);
        assert!(scan(&s, 1.0, 1.0, 10).is_err());
        assert!(scan(&s, -0.1, 1.0, 10).is_err());
        assert!(scan(&s, 0.1, 3.2, 10).is_err());
        assert!(scan(&s, 0.1, 1.0, 1).is_err());
        assert!(residue_histogram(&s, 1.0, 0).is_err());
    }

    #[test]
    fn histogram_shape() {
        let s = ulam(10_000);
        let one = residue_histogram(&s, 2.0, 1).unwrap();
        assert_eq!(one.counts, vec![10_000]);
        let peaked = residue_histogram(&s, 2.571_447_499_5, 32).unwrap();
        assert_eq!(peaked.counts.iter().sum::<u64>(), 10_000);
        let (max, min) = (peaked.counts.iter().max().unwrap(), peaked.counts.iter().min().unwrap());
        assert!(*max >= 2 * (*min).max(1));
        assert_eq!(peaked.bin_edges(31).1, TAU);
    }
}
