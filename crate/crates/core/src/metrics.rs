//! Clustering agreement scores.

use crate::consensus::canonical_labels;
use crate::error::{Error, Result};

/// Contingency table between two labelings, rows indexed by the dense labels
/// of `a` and columns by those of `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contingency {
    pub rows: usize,
    pub cols: usize,
    pub counts: Vec<u64>,
}

impl Contingency {
    pub fn new<A, B>(a: &[A], b: &[B]) -> Result<Self>
    where
        A: Copy + Eq + std::hash::Hash,
        B: Copy + Eq + std::hash::Hash,
    {
        if a.len() != b.len() {
            return Err(Error::input(format!(
                "labelings have different lengths ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        let (a, b) = (canonical_labels(a), canonical_labels(b));
        let rows = a.iter().max().map_or(0, |m| m + 1);
        let cols = b.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![0u64; rows * cols];
        for (&x, &y) in a.iter().zip(&b) {
            counts[x * cols + y] += 1;
        }
        Ok(Contingency { rows, cols, counts })
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn row_sums(&self) -> Vec<u64> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).sum()).collect()
    }

    fn col_sums(&self) -> Vec<u64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    /// Mutual information in nats.
    pub fn mutual_information(&self) -> f64 {
        let n = self.total() as f64;
        let (ra, cb) = (self.row_sums(), self.col_sums());
        let mut mi = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let nij = self.get(i, j);
                if nij > 0 {
                    let nij = nij as f64;
                    mi += nij / n * (n * nij / (ra[i] as f64 * cb[j] as f64)).ln();
                }
            }
        }
        mi.max(0.0)
    }

    /// Entropies of the row and column labelings in nats.
    pub fn entropies(&self) -> (f64, f64) {
        let n = self.total() as f64;
        let h = |sums: Vec<u64>| -> f64 {
            sums.iter()
                .filter(|&&s| s > 0)
                .map(|&s| {
                    let p = s as f64 / n;
                    -p * p.ln()
                })
                .sum()
        };
        (h(self.row_sums()), h(self.col_sums()))
    }

    /// Mutual information over the geometric mean of the two entropies.
    pub fn nmi(&self) -> f64 {
        let (ha, hb) = self.entropies();
        if ha == 0.0 || hb == 0.0 {
            return 0.0;
        }
        // Identical partitions give MI == H exactly; keep that at 1.
        if self.is_matching() {
            return 1.0;
        }
        (self.mutual_information() / (ha * hb).sqrt()).clamp(0.0, 1.0)
    }

    /// True when the table is a permutation matrix pattern, i.e. both
    /// labelings describe the same partition.
    fn is_matching(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).filter(|&j| self.get(i, j) > 0).count() == 1)
    }
}

/// Normalized mutual information between two labelings of the same objects.
/// Two single-cluster labelings score 0.
///
/// ```
/// use ptcluster::metrics::nmi;
/// assert_eq!(nmi(&[0, 0, 1, 1], &[7, 7, 3, 3]).unwrap(), 1.0);
/// assert_eq!(nmi(&[0, 0, 0], &[1, 1, 1]).unwrap(), 0.0);
/// ```
pub fn nmi<A, B>(a: &[A], b: &[B]) -> Result<f64>
where
    A: Copy + Eq + std::hash::Hash,
    B: Copy + Eq + std::hash::Hash,
{
    Ok(Contingency::new(a, b)?.nmi())
}
