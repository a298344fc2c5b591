use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::matrix::StepMatrix;

/// Submultiplicative matrix norms available to the word search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Largest singular value.
    Spectral,
    Frobenius,
    /// Maximum absolute row sum.
    RowSum,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Spectral, NormKind::Frobenius, NormKind::RowSum];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Spectral => "spectral",
            NormKind::Frobenius => "frobenius",
            NormKind::RowSum => "rowsum",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" => Ok(NormKind::Spectral),
            "frobenius" => Ok(NormKind::Frobenius),
            "rowsum" | "row-sum" => Ok(NormKind::RowSum),
            _ => Err(format!("unknown norm {s:?} (expected spectral, frobenius or rowsum)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("power iteration did not converge after {iterations} iterations; norm in [{lower}, {upper}]")]
pub struct NormError {
    pub iterations: usize,
    pub lower: f64,
    pub upper: f64,
}

pub const POWER_TOLERANCE: f64 = 1e-12;
pub const POWER_MAX_ITERATIONS: usize = 10_000;

pub fn operator_norm(m: &StepMatrix, kind: NormKind) -> Result<f64, NormError> {
    match kind {
        NormKind::Spectral => spectral_norm(m),
        NormKind::Frobenius => Ok(frobenius_norm(m)),
        NormKind::RowSum => Ok(row_sum_norm(m)),
    }
}

pub fn frobenius_norm(m: &StepMatrix) -> f64 {
    m.0.iter().flatten().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
}

pub fn row_sum_norm(m: &StepMatrix) -> f64 {
    m.0.iter()
        .map(|row| row.iter().map(|&v| v as u128).sum::<u128>())
        .max()
        .unwrap_or(0) as f64
}

fn gram(a: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let v: f64 = (0..4).map(|k| a[k][i] * a[k][j]).sum();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

fn mat_vec(g: &[[f64; 4]; 4], v: &[f64; 4]) -> [f64; 4] {
    g.map(|row| row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3])
}

/// Largest singular value by power iteration on `M^T M`, starting from the
/// normalised all-ones vector. Stops once the Rayleigh quotient changes by at
/// most [`POWER_TOLERANCE`] relative.
pub fn spectral_norm(m: &StepMatrix) -> Result<f64, NormError> {
    spectral_norm_f64(&m.to_f64())
}

pub(crate) fn spectral_norm_f64(a: &[[f64; 4]; 4]) -> Result<f64, NormError> {
    let g = gram(a);
    let mut v = [0.5; 4];
    let mut lambda = f64::NAN;
    for _ in 0..POWER_MAX_ITERATIONS {
        let w = mat_vec(&g, &v);
        let next: f64 = (0..4).map(|i| v[i] * w[i]).sum();
        let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            return Ok(0.0);
        }
        let converged = (next - lambda).abs() <= POWER_TOLERANCE * next;
        lambda = next;
        v = w.map(|x| x / len);
        if converged {
            return Ok(lambda.sqrt());
        }
    }
    // Collatz-Wielandt: for a non-negative matrix and positive v,
    // lambda_max <= max_i (Gv)_i / v_i.
    let w = mat_vec(&g, &v);
    let upper = (0..4)
        .map(|i| if v[i] > 0.0 { w[i] / v[i] } else if w[i] > 0.0 { f64::INFINITY } else { 0.0 })
        .fold(0.0, f64::max);
    Err(NormError {
        iterations: POWER_MAX_ITERATIONS,
        lower: lambda.sqrt(),
        upper: upper.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::matrix::{step_matrix, Letter, Word};
    use crate::growth::spectral::largest_real_root;

    #[test]
    fn identity() {
        let id = StepMatrix::IDENTITY;
        assert_eq!(operator_norm(&id, NormKind::Spectral).unwrap(), 1.0);
        assert_eq!(operator_norm(&id, NormKind::RowSum).unwrap(), 1.0);
        assert_eq!(operator_norm(&id, NormKind::Frobenius).unwrap(), 2.0);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(spectral_norm(&StepMatrix([[0; 4]; 4])).unwrap(), 0.0);
    }

    #[test]
    fn generator_norms() {
        // sqrt of the largest eigenvalue of T^T T, values checked against an SVD.
        let t1 = spectral_norm(&step_matrix(Letter::TypeI)).unwrap();
        assert!((t1 - 1.618_033_988_749_895).abs() < 1e-12);
        let t2 = spectral_norm(&step_matrix(Letter::TypeII)).unwrap();
        assert!((t2 - 3f64.sqrt()).abs() < 1e-12);
        let t3 = spectral_norm(&step_matrix(Letter::Eggleton)).unwrap();
        assert!((t3 - 3f64.sqrt()).abs() < 1e-12);
        for l in Letter::ALL {
            assert_eq!(row_sum_norm(&step_matrix(l)), 2.0);
            assert!((frobenius_norm(&step_matrix(l)) - 5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn spectral_matches_characteristic_polynomial_of_gram() {
        // Second route: the largest root of det(xI - M^T M), from exact integers.
        for s in ["1", "2", "3", "31", "131", "3121", "313131311313132", "2222222"] {
            let m: StepMatrix = s.parse::<Word>().unwrap().product().unwrap();
            let gram_exact = m.transpose().checked_mul(&m).unwrap();
            let lambda = largest_real_root(&gram_exact).unwrap();
            let sigma = spectral_norm(&m).unwrap();
            assert!((sigma - lambda.sqrt()).abs() <= 1e-10 * sigma, "{s}: {sigma} vs {}", lambda.sqrt());
        }
    }

    #[test]
    fn parse_kinds() {
        for kind in NormKind::ALL {
            assert_eq!(kind.name().parse::<NormKind>().unwrap(), kind);
        }
        assert!("max".parse::<NormKind>().is_err());
    }
}
