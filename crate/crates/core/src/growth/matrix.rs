use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// One of the three recursions, named by the digit used in word strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// `b_{n+1} = b_n + b_{n-3}`
    TypeI = 1,
    /// `b_{n+1} = b_{n-1} + b_{n-2}`
    TypeII = 2,
    /// `b_{n+1} = b_n + b_{n-2}`
    Eggleton = 3,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::TypeI, Letter::TypeII, Letter::Eggleton];

    pub fn digit(self) -> u8 {
        self as u8
    }

    pub fn from_digit(d: u8) -> Option<Self> {
        match d {
            1 => Some(Letter::TypeI),
            2 => Some(Letter::TypeII),
            3 => Some(Letter::Eggleton),
            _ => None,
        }
    }

    pub fn matrix(self) -> StepMatrix {
        step_matrix(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("matrix product overflowed 64-bit entries")]
pub struct ProductOverflow;

/// 4x4 non-negative integer matrix acting on `(b_n, b_{n-1}, b_{n-2}, b_{n-3})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepMatrix(pub [[u64; 4]; 4]);

/// The generator for `kind`. Rows 2-4 shift the state down by one index.
pub fn step_matrix(kind: Letter) -> StepMatrix {
    let top = match kind {
        Letter::TypeI => [1, 0, 0, 1],
        Letter::TypeII => [0, 1, 1, 0],
        Letter::Eggleton => [1, 0, 1, 0],
    };
    StepMatrix([top, [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
}

impl StepMatrix {
    pub const IDENTITY: StepMatrix = StepMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);

    pub fn entries(&self) -> &[[u64; 4]; 4] {
        &self.0
    }

    pub fn checked_mul(&self, rhs: &StepMatrix) -> Result<StepMatrix, ProductOverflow> {
        let mut out = [[0u64; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = 0u64;
                for k in 0..4 {
                    let term = self.0[i][k].checked_mul(rhs.0[k][j]).ok_or(ProductOverflow)?;
                    acc = acc.checked_add(term).ok_or(ProductOverflow)?;
                }
                *cell = acc;
            }
        }
        Ok(StepMatrix(out))
    }

    pub fn apply(&self, state: [u64; 4]) -> Result<[u64; 4], ProductOverflow> {
        let mut out = [0u64; 4];
        for (i, cell) in out.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (&m, &s) in self.0[i].iter().zip(&state) {
                acc = acc
                    .checked_add(m.checked_mul(s).ok_or(ProductOverflow)?)
                    .ok_or(ProductOverflow)?;
            }
            *cell = acc;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> StepMatrix {
        let mut out = [[0u64; 4]; 4];
        for (i, row) in self.0.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out[j][i] = v;
            }
        }
        StepMatrix(out)
    }

    pub fn to_f64(&self) -> [[f64; 4]; 4] {
        self.0.map(|row| row.map(|v| v as f64))
    }
}

/// A product `T_{k_1} T_{k_2} ... T_{k_L}`, letters in left-to-right order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// No two adjacent Eggleton letters.
    pub fn is_admissible(&self) -> bool {
        !self.0.windows(2).any(|w| w[0] == Letter::Eggleton && w[1] == Letter::Eggleton)
    }

    /// Admissible, and still admissible when repeated (`WW`).
    pub fn is_cyclically_admissible(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&first), Some(&last)) => {
                self.is_admissible() && !(first == Letter::Eggleton && last == Letter::Eggleton)
            }
            _ => false,
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// Ordered product of the generators; the empty word gives the identity.
    pub fn product(&self) -> Result<StepMatrix, ProductOverflow> {
        self.0
            .iter()
            .try_fold(StepMatrix::IDENTITY, |acc, &l| acc.checked_mul(&step_matrix(l)))
    }

    /// Same word up to rotation.
    pub fn is_rotation_of(&self, other: &Word) -> bool {
        self.len() == other.len() && (0..self.len().max(1)).any(|r| {
            let mut rotated = self.0.clone();
            rotated.rotate_left(r);
            rotated == other.0
        })
    }
}

/// Ordered product of a (possibly inadmissible) word.
pub fn matrix_product(word: &Word) -> Result<StepMatrix, ProductOverflow> {
    word.product()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.digit())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid word {0:?}: letters must be digits 1, 2 or 3")]
pub struct ParseWordError(pub String);

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.bytes()
            .map(|b| b.checked_sub(b'0').and_then(Letter::from_digit))
            .collect::<Option<Vec<_>>>()
            .map(Word)
            .ok_or_else(|| ParseWordError(s.to_string()))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn generators_act_as_recursions() {
        let state = [13, 11, 8, 6];
        assert_eq!(step_matrix(Letter::Eggleton).apply(state).unwrap(), [21, 13, 11, 8]);
        assert_eq!(step_matrix(Letter::TypeI).apply(state).unwrap(), [19, 13, 11, 8]);
        assert_eq!(step_matrix(Letter::TypeII).apply(state).unwrap(), [19, 13, 11, 8]);
    }

    #[test]
    fn small_products() {
        assert_eq!(w("1").product().unwrap(), step_matrix(Letter::TypeI));
        assert_eq!(w("").product().unwrap(), StepMatrix::IDENTITY);
        let p = w("31").product().unwrap();
        assert_eq!(p.0, [[1, 1, 0, 1], [1, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
        // inadmissible words still multiply
        let p = w("33").product().unwrap();
        assert_eq!(p.0[0], [1, 1, 1, 0]);
    }

    #[test]
    fn product_is_associative_over_concat() {
        let (u, v) = (w("3121"), w("2313"));
        let lhs = u.concat(&v).product().unwrap();
        let rhs = u.product().unwrap().checked_mul(&v.product().unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(w("2").repeat(400).product(), Err(ProductOverflow));
        assert!(w("13").repeat(30).product().is_ok());
    }

    #[test]
    fn admissibility() {
        assert!(w("313").is_admissible());
        assert!(!w("133").is_admissible());
        assert!(!w("313").is_cyclically_admissible());
        assert!(w("31").is_cyclically_admissible());
        assert!(!w("3").is_cyclically_admissible());
        assert!(!w("").is_cyclically_admissible());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("3121").to_string(), "3121");
        assert!("3141".parse::<Word>().is_err());
        assert!("31a".parse::<Word>().is_err());
        assert!(w("311").is_rotation_of(&w("113")));
        assert!(!w("311").is_rotation_of(&w("131311")));
    }
}
