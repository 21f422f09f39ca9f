//! The microcluster–cluster bipartite graph.

use rayon::prelude::*;

use crate::ensemble::{Ensemble, MicroclusterSet};
use crate::error::{Error, Result};
use crate::trajectory::PtsMatrix;

/// Weights between microclusters (rows) and ensemble clusters (columns).
/// Links inside either side are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    n_rows: usize,
    n_cols: usize,
    /// Row-major `Ñ × N_c`.
    weights: Vec<f64>,
    /// `(base clustering, cluster index)` of every column.
    columns: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    /// Wraps a dense non-negative weight matrix. Column origins default to
    /// `(0, j)`.
    pub fn from_dense(n_rows: usize, n_cols: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n_rows * n_cols {
            return Err(Error::input("bipartite weight buffer has the wrong size"));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::input("bipartite weights must be finite and non-negative"));
        }
        Ok(BipartiteGraph {
            n_rows,
            n_cols,
            weights,
            columns: (0..n_cols).map(|j| (0, j)).collect(),
        })
    }

    /// Number of microcluster nodes `Ñ`.
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Number of cluster nodes `N_c`.
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Total node count `Ñ + N_c`.
    pub fn n_nodes(&self) -> usize {
        self.n_rows + self.n_cols
    }

    #[inline]
    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.n_cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.weights[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn column_origin(&self, col: usize) -> (usize, usize) {
        self.columns[col]
    }
}

/// Builds the bipartite graph whose weight between microcluster `y_i` and
/// cluster `C_j` is the mean PTS between `y_i` and the microclusters of
/// `C_j`. Columns enumerate clusters clustering by clustering.
pub fn sim_mc(pts: &PtsMatrix, mcs: &MicroclusterSet, ensemble: &Ensemble) -> Result<BipartiteGraph> {
    let n = mcs.len();
    if pts.n() != n || mcs.n_clusterings() != ensemble.n_clusterings() {
        return Err(Error::input("PTS, microclusters and ensemble disagree in size"));
    }
    let mut columns = Vec::new();
    let mut offset = Vec::with_capacity(ensemble.n_clusterings());
    for (m, &count) in ensemble.clusters_per_base().iter().enumerate() {
        offset.push(columns.len());
        columns.extend((0..count).map(|c| (m, c)));
    }
    let n_cols = columns.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_cols];
    for i in 0..n {
        for (m, &c) in mcs.signature(i).iter().enumerate() {
            members[offset[m] + c as usize].push(i);
        }
    }
    assert!(
        members.iter().all(|c| !c.is_empty()),
        "every ensemble cluster contains at least one microcluster"
    );

    let mut weights = vec![0.0; n * n_cols];
    weights
        .par_chunks_mut(n_cols.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            let sim = pts.matrix().row(i);
            for (w, cluster) in row.iter_mut().zip(&members) {
                let total: f64 = cluster.iter().map(|&k| sim[k]).sum();
                *w = total / cluster.len() as f64;
            }
        });
    Ok(BipartiteGraph {
        n_rows: n,
        n_cols,
        weights,
        columns,
    })
}
