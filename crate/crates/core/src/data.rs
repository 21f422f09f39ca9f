//! Feature matrices used to generate base clusterings.

use crate::error::{Error, Result};

/// `N × d` real feature matrix (row-major) with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    n: usize,
    d: usize,
    values: Vec<f64>,
    truth: Option<Vec<usize>>,
}

impl FeatureDataset {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::input("feature matrix must have at least one row and column"));
        }
        if values.len() != n * d {
            return Err(Error::input(format!(
                "expected {} feature values, got {}",
                n * d,
                values.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite feature at row {}, column {}",
                p / d,
                p % d
            )));
        }
        Ok(FeatureDataset {
            n,
            d,
            values,
            truth: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::input("feature rows have different lengths"));
        }
        Self::new(rows.len(), d, rows.concat())
    }

    /// Attaches ground-truth labels, which must be dense `0..c`.
    pub fn with_truth(mut self, truth: Vec<usize>) -> Result<Self> {
        if truth.len() != self.n {
            return Err(Error::input(format!(
                "{} ground-truth labels for {} objects",
                truth.len(),
                self.n
            )));
        }
        let c = truth.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; c];
        for &t in &truth {
            seen[t] = true;
        }
        if seen.contains(&false) {
            return Err(Error::input("ground-truth labels are not dense 0-based"));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn truth(&self) -> Option<&[usize]> {
        self.truth.as_deref()
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
