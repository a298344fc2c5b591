use serde::Serialize;

use super::matrix::{ProductOverflow, Word};
use super::norm::NormError;
use super::search::{enumerate_admissible, SearchError, TIE_TOLERANCE};
use super::spectral::{gelfand_estimate, spectral_radius};

pub const MAX_PERIOD: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    CharacteristicPolynomial,
    /// `||M^k||^(1/k)` at `k = 64`.
    PowerIteration,
}

/// `rho(T_w)^(1/|w|)`: the growth rate of repeating `w` forever, hence a
/// lower bound on what any norm bound over admissible words can achieve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub word: Word,
    pub period: usize,
    pub value: f64,
    pub method: SpectralMethod,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimateError {
    #[error("word {0} cannot be repeated without two adjacent Eggleton letters")]
    NotPeriodic(Word),
    #[error(transparent)]
    Overflow(#[from] ProductOverflow),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub fn periodic_estimate(word: &Word, method: SpectralMethod) -> Result<SpectralEstimate, EstimateError> {
    if !word.is_cyclically_admissible() {
        return Err(EstimateError::NotPeriodic(word.clone()));
    }
    let m = word.product()?;
    let rho = match method {
        SpectralMethod::CharacteristicPolynomial => spectral_radius(&m),
        SpectralMethod::PowerIteration => gelfand_estimate(&m, 64)?,
    };
    Ok(SpectralEstimate {
        word: word.clone(),
        period: word.len(),
        value: rho.powf(1.0 / word.len() as f64),
        method,
    })
}

/// Best periodic lower bound over words of length `1..=max_period`. Ties
/// within the search tolerance keep the shorter, then lexicographically
/// smaller, word.
pub fn periodic_lower_bound(max_period: usize) -> Result<SpectralEstimate, EstimateError> {
    if max_period == 0 || max_period > MAX_PERIOD {
        return Err(SearchError::Length(max_period, MAX_PERIOD).into());
    }
    let mut best: Option<SpectralEstimate> = None;
    for period in 1..=max_period {
        for word in enumerate_admissible(period)?.filter(Word::is_cyclically_admissible) {
            let est = periodic_estimate(&word, SpectralMethod::CharacteristicPolynomial)?;
            if best.as_ref().is_none_or(|b| est.value > b.value + TIE_TOLERANCE) {
                best = Some(est);
            }
        }
    }
    Ok(best.expect("the word 1 is always periodic"))
}
