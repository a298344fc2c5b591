//! Spectral radius of 4x4 non-negative integer matrices.
//!
//! The characteristic polynomial is computed exactly with the
//! Faddeev-LeVerrier recurrence; its real roots are isolated between the
//! roots of its derivatives and polished by bisection and Newton steps. For a
//! non-negative matrix the Perron root is real and equals the spectral
//! radius, so the largest real root is the answer.

use super::matrix::StepMatrix;
use super::norm::{spectral_norm_f64, NormError};

type IMat = [[i128; 4]; 4];

fn imul(a: &IMat, b: &IMat) -> IMat {
    let mut out = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Coefficients of `det(xI - M)`, lowest degree first; `coeffs[4] == 1`.
pub fn characteristic_polynomial(m: &StepMatrix) -> [i128; 5] {
    let a: IMat = m.0.map(|row| row.map(|v| v as i128));
    let mut coeffs = [0i128; 5];
    coeffs[4] = 1;
    let mut mk = [[0i128; 4]; 4];
    for k in 1..=4 {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = imul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[5 - k];
        }
        mk = next;
        let am = imul(&a, &mk);
        let trace: i128 = (0..4).map(|i| am[i][i]).sum();
        debug_assert_eq!(trace % k as i128, 0);
        coeffs[4 - k] = -trace / k as i128;
    }
    coeffs
}

fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

fn bisect(p: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(p, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All distinct real roots, ascending. `p` is lowest degree first.
pub fn real_roots(p: &[f64]) -> Vec<f64> {
    let mut p = p.to_vec();
    while p.len() > 1 && *p.last().unwrap() == 0.0 {
        p.pop();
    }
    match p.len() {
        0 | 1 => return Vec::new(),
        2 => return vec![-p[0] / p[1]],
        _ => {}
    }
    let lead = *p.last().unwrap();
    let cauchy = 1.0 + p[..p.len() - 1].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let critical = real_roots(&derivative(&p));
    let scale: f64 = p.iter().map(|c| c.abs()).sum();

    let mut knots = vec![-cauchy];
    knots.extend(critical.iter().copied());
    knots.push(cauchy);

    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&last| (r - last).abs() > 1e-9 * (1.0 + r.abs())) {
            roots.push(r);
        }
    };
    for pair in knots.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (flo, fhi) = (eval(&p, lo), eval(&p, hi));
        // A critical point where p vanishes is a repeated root.
        let tangent = 1e-10 * scale * (1.0 + lo.abs()).powi(p.len() as i32 - 1);
        if lo != -cauchy && flo.abs() <= tangent {
            push(lo, &mut roots);
            continue;
        }
        if (flo < 0.0) != (fhi < 0.0) && fhi != 0.0 {
            push(bisect(&p, lo, hi), &mut roots);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
    roots
}

fn newton_polish(p: &[f64], mut x: f64) -> f64 {
    let dp = derivative(p);
    for _ in 0..8 {
        let d = eval(&dp, x);
        if d == 0.0 {
            break;
        }
        let step = eval(p, x) / d;
        let next = x - step;
        if !next.is_finite() || (next - x).abs() > 1e-6 * (1.0 + x.abs()) {
            break;
        }
        x = next;
        if step.abs() <= f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// Largest real eigenvalue, if the matrix has one.
pub fn largest_real_root(m: &StepMatrix) -> Option<f64> {
    let p: Vec<f64> = characteristic_polynomial(m).iter().map(|&c| c as f64).collect();
    real_roots(&p).last().map(|&r| newton_polish(&p, r))
}

/// Spectral radius of a non-negative matrix.
pub fn spectral_radius(m: &StepMatrix) -> f64 {
    largest_real_root(m).unwrap_or(0.0).max(0.0)
}

/// `||M^k||_2^(1/k)` for `k` a power of two, by repeated squaring in floating
/// point with rescaling. Converges to the spectral radius as `k` grows.
pub fn gelfand_estimate(m: &StepMatrix, k: u32) -> Result<f64, NormError> {
    assert!(k.is_power_of_two(), "k must be a power of two");
    let mut a = m.to_f64();
    let mut log_scale = 0.0f64;
    for _ in 0..k.trailing_zeros() {
        let mut sq = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                sq[i][j] = (0..4).map(|l| a[i][l] * a[l][j]).sum();
            }
        }
        log_scale *= 2.0;
        let max = sq.iter().flatten().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        if max == 0.0 {
            return Ok(0.0);
        }
        a = sq.map(|row| row.map(|v| v / max));
        log_scale += max.ln();
    }
    let norm = spectral_norm_f64(&a)?;
    Ok(((norm.ln() + log_scale) / k as f64).exp())
}
