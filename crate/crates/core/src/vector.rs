use std::ops::Index;

use crate::error::{PcmError, Result};

/// Absolute tolerance on the unit sum of a [`PriorityVector`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityVector(Vec<f64>);

impl PriorityVector {
    /// Normalizes `weights` to unit sum.
    ///
    /// Rejects fewer than two entries and any entry that is not a finite,
    /// strictly positive number.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(PcmError::InvalidVector(format!(
                "need at least 2 entries, got {}",
                weights.len()
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(PcmError::InvalidVector(format!(
                "entry {i} is {w}; all entries must be finite and > 0"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if !sum.is_finite() {
            return Err(PcmError::InvalidVector("entries overflow".into()));
        }
        let mut weights = weights;
        weights.iter_mut().for_each(|w| *w /= sum);
        if weights.iter().any(|w| *w <= 0.0) {
            return Err(PcmError::InvalidVector(
                "entry underflows to zero after normalization".into(),
            ));
        }
        Ok(PriorityVector(weights))
    }

    /// The uniform vector `[1/n, ..., 1/n]`.
    pub fn uniform(n: usize) -> Result<Self> {
        PriorityVector::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Convex combination `sum_c coefficients[c] * parts[c]`.
    ///
    /// This is how a hierarchy's total priority vector is composed from
    /// criterion weights and per-criterion alternative weights.
    pub fn compose(coefficients: &PriorityVector, parts: &[PriorityVector]) -> Result<Self> {
        if coefficients.len() != parts.len() {
            return Err(PcmError::DimensionMismatch {
                expected: coefficients.len(),
                found: parts.len(),
            });
        }
        let m = parts[0].len();
        let mut total = vec![0.0; m];
        for (k, part) in coefficients.iter().zip(parts) {
            if part.len() != m {
                return Err(PcmError::DimensionMismatch {
                    expected: m,
                    found: part.len(),
                });
            }
            for (t, a) in total.iter_mut().zip(part.iter()) {
                *t += k * a;
            }
        }
        PriorityVector::new(total)
    }

    /// Formats entries with six decimals, space separated.
    pub fn to_fixed6(&self) -> String {
        self.0
            .iter()
            .map(|w| format!("{w:.6}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Index<usize> for PriorityVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl AsRef<[f64]> for PriorityVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for PriorityVector {
    type Error = PcmError;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        PriorityVector::new(value)
    }
}
