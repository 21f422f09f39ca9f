//! Clustering ensembles, microcluster compression and co-association counts.
//!
//! An [`Ensemble`] holds `M` base clusterings of `N` objects as an `N × M`
//! label matrix. Labels are canonicalized per column on ingestion (dense,
//! 0-based, by order of first appearance); the original values are kept for
//! reporting.
//!
//! Objects whose label rows agree in every column form a *microcluster*
//! ([`build_microclusters`]). Co-association values are stored as integer
//! counts `b` together with `M`, so `a = b / M` comparisons are exact.

use std::collections::HashMap;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};

/// Default cap on `N` for the dense object-level co-association matrix.
pub const DEFAULT_CA_CAP: usize = 5_000;

/// `M` base clusterings of `N` objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    n_objects: usize,
    n_clusterings: usize,
    /// Row-major `N × M`, canonical cluster indices.
    labels: Vec<u32>,
    clusters_per_base: Vec<usize>,
    /// Per column, canonical index -> original label.
    original: Vec<Vec<i64>>,
}

impl Ensemble {
    /// Builds an ensemble from per-object label rows (`rows[i][m]` is the
    /// label of object `i` in clustering `m`).
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::input("ensemble has no objects"));
        }
        let m = rows[0].as_ref().len();
        if m == 0 {
            return Err(Error::input("ensemble has no base clusterings"));
        }
        let mut flat = Vec::with_capacity(n * m);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != m {
                return Err(Error::input(format!(
                    "object {i} has {} labels, expected {m}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        Self::from_row_major(n, m, &flat)
    }

    /// Builds an ensemble from base clusterings given column-wise
    /// (`columns[m][i]` is the label of object `i` in clustering `m`).
    pub fn from_columns<C: AsRef<[i64]>>(columns: &[C]) -> Result<Self> {
        let m = columns.len();
        if m == 0 {
            return Err(Error::input("ensemble has no base clusterings"));
        }
        let n = columns[0].as_ref().len();
        if n == 0 {
            return Err(Error::input("ensemble has no objects"));
        }
        for (k, col) in columns.iter().enumerate() {
            if col.as_ref().len() != n {
                return Err(Error::input(format!(
                    "clustering {k} labels {} objects, expected {n}",
                    col.as_ref().len()
                )));
            }
        }
        let mut flat = vec![0i64; n * m];
        for (k, col) in columns.iter().enumerate() {
            for (i, &l) in col.as_ref().iter().enumerate() {
                flat[i * m + k] = l;
            }
        }
        Self::from_row_major(n, m, &flat)
    }

    fn from_row_major(n: usize, m: usize, flat: &[i64]) -> Result<Self> {
        let mut labels = vec![0u32; n * m];
        let mut original = Vec::with_capacity(m);
        let mut clusters_per_base = Vec::with_capacity(m);
        for k in 0..m {
            let mut index: HashMap<i64, u32> = HashMap::new();
            let mut orig = Vec::new();
            for i in 0..n {
                let l = flat[i * m + k];
                let next = orig.len() as u32;
                let c = *index.entry(l).or_insert_with(|| {
                    orig.push(l);
                    next
                });
                labels[i * m + k] = c;
            }
            clusters_per_base.push(orig.len());
            original.push(orig);
        }
        Ok(Ensemble {
            n_objects: n,
            n_clusterings: m,
            labels,
            clusters_per_base,
            original,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_clusterings(&self) -> usize {
        self.n_clusterings
    }

    /// Number of clusters `n^k` in each base clustering.
    pub fn clusters_per_base(&self) -> &[usize] {
        &self.clusters_per_base
    }

    /// Total number of clusters across all base clusterings (`N_c`).
    pub fn total_clusters(&self) -> usize {
        self.clusters_per_base.iter().sum()
    }

    /// Canonical label row of object `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        let m = self.n_clusterings;
        &self.labels[i * m..(i + 1) * m]
    }

    /// Canonical cluster index of object `i` in clustering `k`.
    pub fn label(&self, i: usize, k: usize) -> u32 {
        self.labels[i * self.n_clusterings + k]
    }

    /// Original (pre-canonicalization) label of object `i` in clustering `k`.
    pub fn original_label(&self, i: usize, k: usize) -> i64 {
        self.original[k][self.label(i, k) as usize]
    }

    /// Canonical labels of clustering `k` for every object.
    pub fn column(&self, k: usize) -> Vec<usize> {
        (0..self.n_objects)
            .map(|i| self.label(i, k) as usize)
            .collect()
    }

    /// SHA-256 of the canonical label matrix, hex encoded. Two ensembles that
    /// differ only by per-column relabeling share a fingerprint.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_objects as u64).to_le_bytes());
        h.update((self.n_clusterings as u64).to_le_bytes());
        for &l in &self.labels {
            h.update(l.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The partition of objects induced by intersecting all base clusterings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicroclusterSet {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
    /// Row-major `Ñ × M`.
    signatures: Vec<u32>,
    n_clusterings: usize,
}

impl MicroclusterSet {
    /// Number of microclusters `Ñ`.
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn n_objects(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_clusterings(&self) -> usize {
        self.n_clusterings
    }

    /// Microcluster index of every object.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Object count `ñ_i` of every microcluster.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Cluster index of microcluster `i` in every base clustering.
    pub fn signature(&self, i: usize) -> &[u32] {
        let m = self.n_clusterings;
        &self.signatures[i * m..(i + 1) * m]
    }

    /// Objects of each microcluster, in ascending order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (obj, &mc) in self.assignment.iter().enumerate() {
            out[mc].push(obj);
        }
        out
    }

    /// Expands per-microcluster labels to per-object labels.
    pub fn expand_labels(&self, mc_labels: &[usize]) -> Vec<usize> {
        assert_eq!(mc_labels.len(), self.len());
        self.assignment.iter().map(|&mc| mc_labels[mc]).collect()
    }
}

/// Groups objects whose full label rows are equal. Microcluster indices follow
/// the order in which their signatures first appear.
pub fn build_microclusters(ensemble: &Ensemble) -> MicroclusterSet {
    let m = ensemble.n_clusterings();
    let mut index: HashMap<&[u32], usize> = HashMap::new();
    let mut assignment = Vec::with_capacity(ensemble.n_objects());
    let mut sizes = Vec::new();
    let mut signatures = Vec::new();
    for i in 0..ensemble.n_objects() {
        let row = ensemble.row(i);
        let mc = *index.entry(row).or_insert_with(|| {
            sizes.push(0);
            signatures.extend_from_slice(row);
            sizes.len() - 1
        });
        sizes[mc] += 1;
        assignment.push(mc);
    }
    MicroclusterSet {
        assignment,
        sizes,
        signatures,
        n_clusterings: m,
    }
}

/// Whether a co-association matrix is indexed by objects or microclusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    Object,
    Microcluster,
}

/// Symmetric co-association matrix stored as co-occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoAssocMatrix {
    n: usize,
    n_clusterings: usize,
    counts: Vec<u32>,
    granularity: Granularity,
}

impl CoAssocMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_clusterings(&self) -> usize {
        self.n_clusterings
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    /// Number of base clusterings in which `i` and `j` share a cluster.
    #[inline]
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.n + j]
    }

    /// Co-association frequency `count / M`.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.count(i, j) as f64 / self.n_clusterings as f64
    }

    /// Dense `f64` copy of the frequencies.
    pub fn to_dense(&self) -> SquareMatrix {
        SquareMatrix::from_fn(self.n, |i, j| self.value(i, j))
    }
}

fn count_agreements(rows: impl Fn(usize) -> Vec<u32> + Sync, n: usize, m: usize) -> Vec<u32> {
    let rows: Vec<Vec<u32>> = (0..n).map(&rows).collect();
    let mut counts = vec![0u32; n * n];
    counts.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, out)| {
        let ri = &rows[i];
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = if i == j {
                m as u32
            } else {
                ri.iter().zip(&rows[j]).filter(|(a, b)| a == b).count() as u32
            };
        }
    });
    counts
}

/// Microcluster-level co-association counts.
pub fn compute_mca(ensemble: &Ensemble, mcs: &MicroclusterSet) -> CoAssocMatrix {
    debug_assert_eq!(ensemble.n_clusterings(), mcs.n_clusterings());
    let n = mcs.len();
    let m = mcs.n_clusterings();
    CoAssocMatrix {
        n,
        n_clusterings: m,
        counts: count_agreements(|i| mcs.signature(i).to_vec(), n, m),
        granularity: Granularity::Microcluster,
    }
}

/// Object-level co-association counts, refused when `N > cap`.
pub fn compute_ca(ensemble: &Ensemble, cap: usize) -> Result<CoAssocMatrix> {
    let n = ensemble.n_objects();
    if n > cap {
        return Err(Error::TooLarge {
            what: "object-level co-association matrix",
            size: n,
            cap,
        });
    }
    let m = ensemble.n_clusterings();
    Ok(CoAssocMatrix {
        n,
        n_clusterings: m,
        counts: count_agreements(|i| ensemble.row(i).to_vec(), n, m),
        granularity: Granularity::Object,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eight_objects() -> Ensemble {
        Ensemble::from_columns(&[
            vec![1, 1, 1, 1, 2, 2, 2, 2],
            vec![1, 1, 1, 2, 2, 2, 3, 3],
        ])
        .unwrap()
    }

    /// Pairwise-comparison oracle: object `i` joins the group of the first
    /// earlier object with an identical row.
    fn pairwise_partition(e: &Ensemble) -> Vec<usize> {
        let n = e.n_objects();
        let mut group = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            for j in 0..i {
                if e.row(i) == e.row(j) {
                    group[i] = group[j];
                    break;
                }
            }
            if group[i] == usize::MAX {
                group[i] = next;
                next += 1;
            }
        }
        group
    }

    fn random_ensemble(n: usize, m: usize, seed: u64) -> Ensemble {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let cols: Vec<Vec<i64>> = (0..m)
            .map(|_| {
                let c = rng.random_range(2..6);
                (0..n).map(|_| rng.random_range(0..c)).collect()
            })
            .collect();
        Ensemble::from_columns(&cols).unwrap()
    }

    #[test]
    fn eight_object_microclusters() {
        let mcs = build_microclusters(&eight_objects());
        assert_eq!(
            mcs.members(),
            vec![vec![0, 1, 2], vec![3], vec![4, 5], vec![6, 7]]
        );
        assert_eq!(mcs.sizes(), &[3, 1, 2, 2]);
    }

    #[test]
    fn single_clustering_microclusters_are_its_clusters() {
        let e = Ensemble::from_columns(&[vec![7, 3, 7, 9, 3]]).unwrap();
        let mcs = build_microclusters(&e);
        assert_eq!(mcs.assignment(), &[0, 1, 0, 2, 1]);
    }

    #[test]
    fn eight_object_mca_counts() {
        let e = eight_objects();
        let mcs = build_microclusters(&e);
        let mca = compute_mca(&e, &mcs);
        let expect = [
            [2, 1, 0, 0],
            [1, 2, 1, 0],
            [0, 1, 2, 1],
            [0, 0, 1, 2],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(mca.count(i, j), expect[i][j], "({i},{j})");
            }
        }
        assert_eq!(mca.value(0, 1), 0.5);
        assert_eq!(mca.granularity(), Granularity::Microcluster);
    }

    #[test]
    fn eight_object_ca_values() {
        let ca = compute_ca(&eight_objects(), DEFAULT_CA_CAP).unwrap();
        assert_eq!(ca.value(0, 3), 0.5);
        assert_eq!(ca.value(3, 4), 0.5);
        assert_eq!(ca.value(0, 4), 0.0);
        assert!((0..8).all(|i| ca.value(i, i) == 1.0));
    }

    #[test]
    fn identical_copies_give_binary_mca() {
        let col = vec![0, 0, 1, 1, 2, 2, 2];
        let e = Ensemble::from_columns(&vec![col.clone(); 4]).unwrap();
        let mcs = build_microclusters(&e);
        let mca = compute_mca(&e, &mcs);
        for i in 0..mcs.len() {
            for j in 0..mcs.len() {
                assert_eq!(mca.value(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn ca_cap_is_enforced() {
        let e = random_ensemble(30, 2, 1);
        assert!(matches!(compute_ca(&e, 29), Err(Error::TooLarge { .. })));
        assert!(compute_ca(&e, 30).is_ok());
    }

    #[test]
    fn ragged_and_empty_inputs_are_rejected() {
        assert!(Ensemble::from_rows(&[vec![1, 2], vec![1]]).is_err());
        assert!(Ensemble::from_columns(&[vec![1, 2], vec![1]]).is_err());
        assert!(Ensemble::from_rows::<Vec<i64>>(&[]).is_err());
    }

    #[test]
    fn canonical_labels_keep_originals() {
        let e = Ensemble::from_columns(&[vec![40, -3, 40]]).unwrap();
        assert_eq!(e.column(0), vec![0, 1, 0]);
        assert_eq!(e.original_label(1, 0), -3);
        assert_eq!(e.clusters_per_base(), &[2]);
    }

    #[test]
    fn random_matches_pairwise_oracle() {
        let e = random_ensemble(50, 5, 7);
        let mcs = build_microclusters(&e);
        assert_eq!(mcs.assignment(), pairwise_partition(&e).as_slice());

        let mca = compute_mca(&e, &mcs);
        for i in 0..mcs.len() {
            for j in 0..mcs.len() {
                let direct = (0..5)
                    .filter(|&k| mcs.signature(i)[k] == mcs.signature(j)[k])
                    .count() as u32;
                assert_eq!(mca.count(i, j), direct);
            }
        }
    }

    proptest! {
        #[test]
        fn ca_equals_mca_through_containment(seed in any::<u64>(), n in 1usize..80, m in 1usize..8) {
            let e = random_ensemble(n, m, seed);
            let mcs = build_microclusters(&e);
            let mca = compute_mca(&e, &mcs);
            let ca = compute_ca(&e, DEFAULT_CA_CAP).unwrap();
            let a = mcs.assignment();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(ca.count(i, j), mca.count(a[i], a[j]));
                }
            }
        }

        #[test]
        fn relabeling_preserves_partition(seed in any::<u64>(), shift in 1i64..50) {
            let e = random_ensemble(60, 4, seed);
            let cols: Vec<Vec<i64>> = (0..4)
                .map(|k| (0..60).map(|i| 1000 - shift * e.label(i, k) as i64).collect())
                .collect();
            let relabeled = Ensemble::from_columns(&cols).unwrap();
            let a = build_microclusters(&e);
            let b = build_microclusters(&relabeled);
            prop_assert_eq!(a.assignment(), b.assignment());
        }

        #[test]
        fn microcluster_count_bounds(seed in any::<u64>(), n in 1usize..100) {
            let e = random_ensemble(n, 3, seed);
            let mcs = build_microclusters(&e);
            prop_assert!(mcs.len() <= n);
            prop_assert_eq!(mcs.sizes().iter().sum::<usize>(), n);
            let distinct_rows = (0..n).all(|i| (0..i).all(|j| e.row(i) != e.row(j)));
            prop_assert_eq!(mcs.len() == n, distinct_rows);
        }
    }
}
