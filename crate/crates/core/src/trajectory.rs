//! Size-aware random walks and probability-trajectory similarity (PTS).
//!
//! A walker on the K-ENG moves from microcluster `i` to a neighbor `j` with
//! probability proportional to `ñ_j · w_ij`: the total weight of the hidden
//! object-level links between the two microclusters. Isolated nodes get an
//! absorbing self-loop so every row of `P` stays stochastic.
//!
//! The trajectory of node `i` concatenates rows `i` of `P¹ … P^T`. PTS is the
//! cosine of two trajectories, so it only needs the Gram matrix
//!
//! ```text
//! G = Σ_{t=1..T} P^t (P^t)ᵀ
//! ```
//!
//! which is accumulated through `H_t = P · H_{t-1} · Pᵀ` with `H_0 = I`.
//! Every step costs two sparse-times-dense products instead of a dense
//! cubic product. Nodes in different connected components have disjoint
//! trajectory supports; the walk runs on each component separately and
//! cross-component similarity is exactly zero.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};
use crate::graph::SparseSimGraph;

/// Default `K` and `T`: `floor(sqrt(Ñ) / 2)`, at least 1.
pub fn default_parameter(n_microclusters: usize) -> usize {
    (((n_microclusters as f64).sqrt() / 2.0).floor() as usize).max(1)
}

/// Row-stochastic sparse transition matrix in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    component: Vec<usize>,
    n_components: usize,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `(column, probability)` entries of row `i`, by ascending column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, p)| p)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Connected-component label of every node (labels by first appearance).
    pub fn component_ids(&self) -> &[usize] {
        &self.component
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn to_dense(&self) -> SquareMatrix {
        let mut d = SquareMatrix::zeros(self.n);
        for i in 0..self.n {
            for (j, p) in self.row(i) {
                d[(i, j)] = p;
            }
        }
        d
    }

    /// `self · dense`, one output row per CSR row.
    pub fn mul_dense(&self, dense: &SquareMatrix) -> SquareMatrix {
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        spmm(&self.row_ptr, &self.cols, &self.vals, dense.as_slice(), out.as_mut_slice(), n);
        out
    }

    fn submatrix(&self, nodes: &[usize], local: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let mut row_ptr = Vec::with_capacity(nodes.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for &g in nodes {
            for (j, p) in self.row(g) {
                cols.push(local[j]);
                vals.push(p);
            }
            row_ptr.push(cols.len());
        }
        (row_ptr, cols, vals)
    }
}

/// Columns per tile in [`spmm`]; a tile of the dense operand stays in L2
/// while every output row of a task consumes it.
const SPMM_TILE: usize = 64;

fn spmm(row_ptr: &[usize], cols: &[usize], vals: &[f64], dense: &[f64], out: &mut [f64], n: usize) {
    if n == 0 {
        return;
    }
    let rows_per_task = n.div_ceil(4 * rayon::current_num_threads()).max(1);
    out.par_chunks_mut(n * rows_per_task).enumerate().for_each(|(task, block)| {
        block.fill(0.0);
        let first = task * rows_per_task;
        for c0 in (0..n).step_by(SPMM_TILE) {
            let c1 = (c0 + SPMM_TILE).min(n);
            for (r, out_row) in block.chunks_mut(n).enumerate() {
                let i = first + r;
                let out_tile = &mut out_row[c0..c1];
                let w = c1 - c0;
                let tile = |e: usize| &dense[cols[e] * n + c0..cols[e] * n + c1];
                let (start, end) = (row_ptr[i], row_ptr[i + 1]);
                let mut e = start;
                // Four nonzeros per pass halve the traffic on the output tile.
                while e + 4 <= end {
                    let (p0, p1, p2, p3) = (vals[e], vals[e + 1], vals[e + 2], vals[e + 3]);
                    let (s0, s1, s2, s3) = (tile(e), tile(e + 1), tile(e + 2), tile(e + 3));
                    for x in 0..w {
                        out_tile[x] += p0 * s0[x] + p1 * s1[x] + p2 * s2[x] + p3 * s3[x];
                    }
                    e += 4;
                }
                for e in e..end {
                    let p = vals[e];
                    for (o, s) in out_tile.iter_mut().zip(tile(e)) {
                        *o += p * s;
                    }
                }
            }
        }
    });
}

/// Builds the size-aware transition matrix of a K-ENG.
pub fn build_transition(keng: &SparseSimGraph) -> TransitionMatrix {
    let n = keng.n_nodes();
    let sizes = keng.node_sizes();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(2 * keng.n_links() + n);
    let mut vals = Vec::with_capacity(2 * keng.n_links() + n);
    row_ptr.push(0);
    for i in 0..n {
        let nb = keng.neighbors(i);
        if nb.is_empty() {
            cols.push(i);
            vals.push(1.0);
        } else {
            let denom: f64 = nb.iter().map(|&(j, w)| sizes[j] as f64 * w).sum();
            for &(j, w) in nb {
                cols.push(j);
                vals.push(sizes[j] as f64 * w / denom);
            }
        }
        row_ptr.push(cols.len());
    }

    let mut component = vec![usize::MAX; n];
    let mut n_components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = n_components;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &(v, _) in keng.neighbors(u) {
                if component[v] == usize::MAX {
                    component[v] = n_components;
                    stack.push(v);
                }
            }
        }
        n_components += 1;
    }

    TransitionMatrix {
        n,
        row_ptr,
        cols,
        vals,
        component,
        n_components,
    }
}

/// Iterator over the step distributions `P¹, P², …, P^T`.
#[derive(Debug)]
pub struct WalkDistributions<'a> {
    p: &'a TransitionMatrix,
    current: Option<SquareMatrix>,
    step: usize,
    steps: usize,
}

impl Iterator for WalkDistributions<'_> {
    type Item = SquareMatrix;

    fn next(&mut self) -> Option<SquareMatrix> {
        if self.step == self.steps {
            return None;
        }
        let next = match &self.current {
            None => self.p.to_dense(),
            Some(prev) => self.p.mul_dense(prev),
        };
        self.step += 1;
        self.current = Some(next.clone());
        Some(next)
    }
}

/// Successive walk distributions `P^t = P · P^{t-1}` for `t = 1..=steps`.
pub fn walk_distributions(p: &TransitionMatrix, steps: usize) -> Result<WalkDistributions<'_>> {
    if steps == 0 {
        return Err(Error::param("trajectory length T must be at least 1"));
    }
    Ok(WalkDistributions {
        p,
        current: None,
        step: 0,
        steps,
    })
}

/// `G = Σ_t P^t (P^t)ᵀ` for `t = 1..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryGram {
    gram: SquareMatrix,
    steps: usize,
}

impl TrajectoryGram {
    pub fn matrix(&self) -> &SquareMatrix {
        &self.gram
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Gram matrix of one connected block given in local CSR form.
fn block_gram(row_ptr: &[usize], cols: &[usize], vals: &[f64], n: usize, steps: usize) -> Vec<f64> {
    let mut h = SquareMatrix::identity(n).into_vec();
    let mut a = vec![0.0; n * n];
    let mut g = vec![0.0; n * n];
    for _ in 0..steps {
        // A = P·H_{t-1}; H_t = A·Pᵀ, filled on and above the diagonal.
        spmm(row_ptr, cols, vals, &h, &mut a, n);
        upper_times_transpose(&a, row_ptr, cols, vals, &mut h, n);
        mirror_upper(&mut h, n);
        for (acc, v) in g.iter_mut().zip(&h) {
            *acc += v;
        }
    }
    g
}

/// Upper triangle (`j >= i`) of `A·Pᵀ` into `out`; entries below the
/// diagonal are left unspecified. Four rows of `A` are swept together so the
/// accumulations are independent.
fn upper_times_transpose(a: &[f64], row_ptr: &[usize], cols: &[usize], vals: &[f64], out: &mut [f64], n: usize) {
    const ROWS: usize = 4;
    out.par_chunks_mut(n * ROWS).enumerate().for_each(|(task, block)| {
        let first = task * ROWS;
        let rows = block.len() / n;
        if rows < ROWS {
            for r in 0..rows {
                let a_row = &a[(first + r) * n..(first + r + 1) * n];
                for j in first + r..n {
                    block[r * n + j] = (row_ptr[j]..row_ptr[j + 1]).map(|e| a_row[cols[e]] * vals[e]).sum();
                }
            }
            return;
        }
        let a0 = &a[first * n..(first + 1) * n];
        let a1 = &a[(first + 1) * n..(first + 2) * n];
        let a2 = &a[(first + 2) * n..(first + 3) * n];
        let a3 = &a[(first + 3) * n..(first + 4) * n];
        for j in first..n {
            let mut acc = [0.0; ROWS];
            for e in row_ptr[j]..row_ptr[j + 1] {
                let (c, v) = (cols[e], vals[e]);
                acc[0] += a0[c] * v;
                acc[1] += a1[c] * v;
                acc[2] += a2[c] * v;
                acc[3] += a3[c] * v;
            }
            for (r, x) in acc.into_iter().enumerate() {
                block[r * n + j] = x;
            }
        }
    });
}

/// Copies the upper triangle of a row-major square matrix onto the lower one,
/// tile by tile.
fn mirror_upper(m: &mut [f64], n: usize) {
    const TILE: usize = 32;
    for bi in (0..n).step_by(TILE) {
        for bj in (bi..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                for j in bj.max(i + 1)..(bj + TILE).min(n) {
                    m[j * n + i] = m[i * n + j];
                }
            }
        }
    }
}

/// Accumulates the trajectory Gram matrix component by component.
pub fn trajectory_gram(p: &TransitionMatrix, steps: usize) -> Result<TrajectoryGram> {
    if steps == 0 {
        return Err(Error::param("trajectory length T must be at least 1"));
    }
    let n = p.n();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); p.n_components()];
    for (node, &c) in p.component_ids().iter().enumerate() {
        groups[c].push(node);
    }
    let mut local = vec![0usize; n];
    let mut gram = SquareMatrix::zeros(n);
    for nodes in &groups {
        for (l, &g) in nodes.iter().enumerate() {
            local[g] = l;
        }
        let (row_ptr, cols, vals) = p.submatrix(nodes, &local);
        let nc = nodes.len();
        let block = block_gram(&row_ptr, &cols, &vals, nc, steps);
        for (li, &gi) in nodes.iter().enumerate() {
            let row = gram.row_mut(gi);
            for (lj, &gj) in nodes.iter().enumerate() {
                row[gj] = block[li * nc + lj];
            }
        }
    }
    Ok(TrajectoryGram { gram, steps })
}

/// Dense symmetric similarity matrix with unit diagonal and entries in
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PtsMatrix {
    sim: SquareMatrix,
    steps: usize,
}

impl PtsMatrix {
    /// Normalizes a Gram matrix into cosine similarities.
    pub fn from_gram(gram: TrajectoryGram) -> Result<Self> {
        let n = gram.gram.n();
        let diag: Vec<f64> = (0..n).map(|i| gram.gram[(i, i)]).collect();
        if let Some(i) = diag.iter().position(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::Numeric(format!(
                "trajectory of node {i} has squared norm {}",
                diag[i]
            )));
        }
        let inv: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
        let mut sim = gram.gram;
        sim.as_mut_slice()
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j {
                        1.0
                    } else {
                        (*v * inv[i] * inv[j]).clamp(0.0, 1.0)
                    };
                }
            });
        // Rounding in the products above can differ between (i,j) and (j,i).
        for i in 0..n {
            for j in 0..i {
                sim[(i, j)] = sim[(j, i)];
            }
        }
        Ok(PtsMatrix {
            sim,
            steps: gram.steps,
        })
    }

    /// Wraps an arbitrary similarity matrix (for example a co-association
    /// matrix). It must be symmetric with unit diagonal and entries in
    /// `[0, 1]`.
    pub fn from_matrix(sim: SquareMatrix, steps: usize) -> Result<Self> {
        let n = sim.n();
        for i in 0..n {
            if sim[(i, i)] != 1.0 {
                return Err(Error::input(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = sim[(i, j)];
                if !(0.0..=1.0).contains(&v) || v != sim[(j, i)] {
                    return Err(Error::input(format!(
                        "entry ({i},{j}) is not a symmetric value in [0,1]"
                    )));
                }
            }
        }
        Ok(PtsMatrix { sim, steps })
    }

    pub fn n(&self) -> usize {
        self.sim.n()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sim[(i, j)]
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.sim
    }

    /// Bytes held by the dense similarity values.
    pub fn heap_bytes(&self) -> usize {
        std::mem::size_of_val(self.sim.as_slice())
    }
}

/// Computes PTS with trajectories of length `steps`.
pub fn compute_pts(p: &TransitionMatrix, steps: usize) -> Result<PtsMatrix> {
    PtsMatrix::from_gram(trajectory_gram(p, steps)?)
}

const PTS_MAGIC: &[u8; 8] = b"PTSDUMP1";

/// Metadata stored in front of a PTS dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PtsHeader {
    pub n: usize,
    pub steps: usize,
    pub k_elite: usize,
}

/// Writes the lower triangle (diagonal included, row-major) as little-endian
/// `f64` after an 8-byte magic and three little-endian `u64`: `Ñ`, `T`, `K`.
pub fn write_pts<W: Write>(pts: &PtsMatrix, k_elite: usize, mut out: W) -> Result<()> {
    out.write_all(PTS_MAGIC)?;
    for v in [pts.n(), pts.steps(), k_elite] {
        out.write_all(&(v as u64).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(pts.n() * (pts.n() + 1) / 2 * 8);
    for i in 0..pts.n() {
        for j in 0..=i {
            buf.extend_from_slice(&pts.get(i, j).to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Reads a dump produced by [`write_pts`].
pub fn read_pts<R: Read>(mut input: R) -> Result<(PtsMatrix, PtsHeader)> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != PTS_MAGIC {
        return Err(Error::input("not a PTS dump"));
    }
    let mut word = [0u8; 8];
    let mut header = [0usize; 3];
    for h in &mut header {
        input.read_exact(&mut word)?;
        *h = u64::from_le_bytes(word) as usize;
    }
    let [n, steps, k_elite] = header;
    let mut sim = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            input.read_exact(&mut word)?;
            let v = f64::from_le_bytes(word);
            sim[(i, j)] = v;
            sim[(j, i)] = v;
        }
    }
    Ok((PtsMatrix::from_matrix(sim, steps)?, PtsHeader { n, steps, k_elite }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_keng, Edge, GraphKind};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn graph(sizes: Vec<usize>, edges: &[(usize, usize, f64)]) -> SparseSimGraph {
        SparseSimGraph::from_edges(
            GraphKind::Keng,
            sizes,
            0,
            edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }),
        )
        .unwrap()
    }

    fn random_keng(n: usize, seed: u64) -> SparseSimGraph {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(0.15) {
                    edges.push((u, v, rng.random_range(1..=10) as f64 / 10.0));
                }
            }
        }
        let sizes = (0..n).map(|_| rng.random_range(1..6)).collect();
        build_keng(&graph(sizes, &edges), 4).unwrap()
    }

    fn naive_matmul(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
        let n = a.n();
        SquareMatrix::from_fn(n, |i, j| (0..n).map(|k| a[(i, k)] * b[(k, j)]).sum())
    }

    /// Materializes every length-`T·Ñ` trajectory and takes cosines directly.
    fn explicit_pts(p: &TransitionMatrix, steps: usize) -> SquareMatrix {
        let n = p.n();
        let dense = p.to_dense();
        let mut power = dense.clone();
        let mut traj = vec![Vec::with_capacity(steps * n); n];
        for t in 0..steps {
            if t > 0 {
                power = naive_matmul(&dense, &power);
            }
            for (i, tr) in traj.iter_mut().enumerate() {
                tr.extend_from_slice(power.row(i));
            }
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        SquareMatrix::from_fn(n, |i, j| {
            dot(&traj[i], &traj[j]) / (dot(&traj[i], &traj[i]) * dot(&traj[j], &traj[j])).sqrt()
        })
    }

    #[test]
    fn size_aware_transitions() {
        let g = graph(vec![4, 1, 2], &[(0, 2, 0.7), (1, 2, 0.7)]);
        let p = build_transition(&g);
        assert!((p.get(2, 0) - 0.8).abs() < 1e-12);
        assert!((p.get(2, 1) - 0.2).abs() < 1e-12);
        assert_eq!(format!("{:.4} {:.4}", p.get(2, 0), p.get(2, 1)), "0.8000 0.2000");
        assert_eq!(p.get(0, 2), 1.0);
    }

    #[test]
    fn equal_sizes_star_is_uniform() {
        let g = graph(vec![1; 5], &[(0, 1, 0.3), (0, 2, 0.3), (0, 3, 0.3), (0, 4, 0.3)]);
        let p = build_transition(&g);
        for j in 1..5 {
            assert!((p.get(0, j) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn rows_are_stochastic() {
        let p = build_transition(&random_keng(200, 1));
        for i in 0..p.n() {
            let s: f64 = p.row(i).map(|(_, v)| v).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_nodes_absorb() {
        let g = graph(vec![1, 1, 1], &[(0, 1, 0.5)]);
        let p = build_transition(&g);
        assert_eq!(p.get(2, 2), 1.0);
        assert_eq!(p.component_ids(), &[0, 0, 1]);
        let pts = compute_pts(&p, 3).unwrap();
        assert_eq!(pts.get(0, 2), 0.0);
        assert_eq!(pts.get(2, 2), 1.0);
    }

    #[test]
    fn walk_powers() {
        let g = graph(vec![1, 1], &[(0, 1, 1.0)]);
        let p = build_transition(&g);
        let powers: Vec<_> = walk_distributions(&p, 2).unwrap().collect();
        assert_eq!(powers[0], p.to_dense());
        assert_eq!(powers[1], SquareMatrix::identity(2));
        assert!(walk_distributions(&p, 0).is_err());
        assert!(trajectory_gram(&p, 0).is_err());
    }

    #[test]
    fn walk_matches_dense_powers() {
        let p = build_transition(&random_keng(60, 4));
        let dense = p.to_dense();
        let third = walk_distributions(&p, 3).unwrap().nth(2).unwrap();
        let oracle = naive_matmul(&dense, &naive_matmul(&dense, &dense));
        assert!(third.max_abs_diff(&oracle) <= 1e-10);
    }

    #[test]
    fn long_walks_stay_stochastic_and_local() {
        let p = build_transition(&random_keng(50, 8));
        let comp = p.component_ids();
        let last = walk_distributions(&p, 128).unwrap().last().unwrap();
        for i in 0..p.n() {
            let row = last.row(i);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            for j in 0..p.n() {
                if comp[i] != comp[j] {
                    assert_eq!(row[j], 0.0);
                }
            }
        }
    }

    #[test]
    fn gram_matches_explicit_trajectories() {
        let p = build_transition(&random_keng(100, 2));
        let pts = compute_pts(&p, 8).unwrap();
        assert!(pts.matrix().max_abs_diff(&explicit_pts(&p, 8)) <= 1e-10);
    }

    #[test]
    fn pts_dump_round_trip() {
        let p = build_transition(&random_keng(30, 3));
        let pts = compute_pts(&p, 5).unwrap();
        let mut buf = Vec::new();
        write_pts(&pts, 4, &mut buf).unwrap();
        let (back, header) = read_pts(buf.as_slice()).unwrap();
        assert_eq!(header, PtsHeader { n: 30, steps: 5, k_elite: 4 });
        assert_eq!(back, pts);
        assert!(read_pts(&b"garbage!"[..]).is_err());
    }

    #[test]
    fn default_parameters() {
        assert_eq!(default_parameter(242), 7);
        assert_eq!(default_parameter(1), 1);
        assert_eq!(default_parameter(2000), 22);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn pts_invariants(seed in any::<u64>(), n in 2usize..40, steps in 1usize..10) {
            let p = build_transition(&random_keng(n, seed));
            let pts = compute_pts(&p, steps).unwrap();
            let comp = p.component_ids();
            for i in 0..n {
                prop_assert_eq!(pts.get(i, i), 1.0);
                for j in 0..n {
                    let v = pts.get(i, j);
                    prop_assert!((0.0..=1.0).contains(&v));
                    prop_assert_eq!(v, pts.get(j, i));
                    if comp[i] != comp[j] {
                        prop_assert_eq!(v, 0.0);
                    }
                }
            }
        }

        #[test]
        fn pts_is_permutation_equivariant(seed in any::<u64>(), n in 2usize..25) {
            let g = random_keng(n, seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let mut perm: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            let mut sizes = vec![0; n];
            for i in 0..n {
                sizes[perm[i]] = g.node_sizes()[i];
            }
            let edges: Vec<_> = g.edges().iter().map(|e| (perm[e.u], perm[e.v], e.weight)).collect();
            let permuted = graph(sizes, &edges);
            let a = compute_pts(&build_transition(&g), 6).unwrap();
            let b = compute_pts(&build_transition(&permuted), 6).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((a.get(i, j) - b.get(perm[i], perm[j])).abs() < 1e-12);
                }
            }
        }
    }
}
