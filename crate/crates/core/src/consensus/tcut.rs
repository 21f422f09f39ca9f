//! Transfer-cut partitioning of bipartite graphs and the PTGP consensus.
//!
//! For a bipartite weight matrix `B` (rows `×` columns) with row degrees
//! `D_r` and column degrees `D_c`, the spectral problem on the full graph
//! reduces to the column side:
//!
//! ```text
//! W_c = Bᵀ D_r⁻¹ B,   (D_c − W_c) v = λ D_c v
//! ```
//!
//! An eigenpair `(λ, v)` of the small problem corresponds to the full-graph
//! eigenvector whose row part is `u = D_r⁻¹ B v / sqrt(1 − λ)`. The `k`
//! smallest-`λ` directions are transferred to the rows, the row embedding is
//! normalized to unit length and clustered with k-means. Directions with
//! `λ = 1` carry no row signal and are dropped.
//!
//! Disconnected graphs are split into components. With at least `k`
//! components, components are grouped into `k` size-balanced clusters;
//! otherwise every component receives clusters in proportion to its size
//! and is partitioned on its own.

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::MicroclusterSet;
use crate::error::{Error, Result};
use crate::kmeans::{lloyd, KMeansConfig, KMeansInit};

use super::{canonical_labels, BipartiteGraph, ConsensusResult, Method, Provenance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtgpConfig {
    pub seed: u64,
    /// k-means restarts on the spectral embedding.
    pub restarts: usize,
    pub kmeans_max_iter: usize,
    /// `1 − λ` at or below this value counts as a degenerate direction.
    pub degenerate_tol: f64,
}

impl Default for PtgpConfig {
    fn default() -> Self {
        PtgpConfig {
            seed: 0x5eed,
            restarts: 10,
            kmeans_max_iter: 100,
            degenerate_tol: 1e-12,
        }
    }
}

/// Spectral metadata recorded by PTGP.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingInfo {
    /// Retained eigenvalues `λ`, component by component.
    pub eigenvalues: Vec<f64>,
    /// Directions dropped because `λ = 1`.
    pub dropped: usize,
    /// Connected components of the bipartite graph.
    pub components: usize,
    /// Clusters requested from each component.
    pub allocation: Vec<usize>,
}

/// Segments of a bipartite graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TcutPartition {
    /// Segment of every row node, dense by first appearance.
    pub row_labels: Vec<usize>,
    /// Segment of every column node: the row segment it has the largest total
    /// weight to (lowest segment on ties).
    pub col_labels: Vec<usize>,
    pub info: EmbeddingInfo,
}

struct Block {
    rows: Vec<usize>,
    cols: Vec<usize>,
    size: usize,
}

fn components(bg: &BipartiteGraph, row_sizes: &[usize]) -> Vec<Block> {
    let (r, c) = (bg.n_rows(), bg.n_cols());
    let mut parent: Vec<usize> = (0..r + c).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..r {
        for j in 0..c {
            if bg.weight(i, j) > 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, r + j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let roots: Vec<usize> = (0..r + c).map(|x| find(&mut parent, x)).collect();
    let ids = canonical_labels(&roots);
    let count = ids.iter().max().map_or(0, |m| m + 1);
    let mut blocks: Vec<Block> = (0..count)
        .map(|_| Block {
            rows: Vec::new(),
            cols: Vec::new(),
            size: 0,
        })
        .collect();
    for (x, &id) in ids.iter().enumerate() {
        if x < r {
            blocks[id].rows.push(x);
            blocks[id].size += row_sizes[x];
        } else {
            blocks[id].cols.push(x - r);
        }
    }
    blocks
}

/// Clusters per component: at least one each, the rest handed out to the
/// component furthest below its proportional share that still has room.
fn allocate(blocks: &[Block], k: usize) -> Vec<usize> {
    let total: usize = blocks.iter().map(|b| b.size).sum();
    let cap: Vec<usize> = blocks.iter().map(|b| b.rows.len().min(b.cols.len()).max(1)).collect();
    let mut alloc = vec![1usize; blocks.len()];
    let mut assigned = blocks.len();
    while assigned < k {
        let pick = (0..blocks.len())
            .filter(|&c| alloc[c] < cap[c])
            .map(|c| {
                let quota = k as f64 * blocks[c].size as f64 / total.max(1) as f64;
                (c, quota - alloc[c] as f64)
            })
            .fold(None, |best: Option<(usize, f64)>, (c, deficit)| match best {
                Some((_, d)) if d >= deficit => best,
                _ => Some((c, deficit)),
            });
        match pick {
            Some((c, _)) => {
                alloc[c] += 1;
                assigned += 1;
            }
            None => break,
        }
    }
    alloc
}

/// Groups components into `k` clusters, largest first into the currently
/// lightest group.
fn group_components(blocks: &[Block], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&a, &b| blocks[b].size.cmp(&blocks[a].size).then(a.cmp(&b)));
    let mut load = vec![0usize; k];
    let mut group = vec![0usize; blocks.len()];
    for c in order {
        let g = (0..k).min_by_key(|&g| (load[g], g)).unwrap();
        group[c] = g;
        load[g] += blocks[c].size;
    }
    group
}

/// Spectral partition of one connected block into `k` segments. Returns local
/// row labels, retained eigenvalues and the number of dropped directions.
fn partition_block(
    bg: &BipartiteGraph,
    block: &Block,
    k: usize,
    cfg: &PtgpConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<f64>, usize)> {
    let (r, c) = (block.rows.len(), block.cols.len());
    let b = |i: usize, j: usize| bg.weight(block.rows[i], block.cols[j]);
    let d_r: Vec<f64> = (0..r).map(|i| (0..c).map(|j| b(i, j)).sum()).collect();
    let d_c: Vec<f64> = (0..c).map(|j| (0..r).map(|i| b(i, j)).sum()).collect();

    // Normalized column affinity D_c^{-1/2} Bᵀ D_r⁻¹ B D_c^{-1/2} = YᵀY with
    // Y = D_r^{-1/2} B D_c^{-1/2}.
    let scale: Vec<f64> = d_c.iter().map(|d| 1.0 / d.sqrt()).collect();
    let y = DMatrix::<f64>::from_fn(r, c, |i, j| b(i, j) * scale[j] / d_r[i].sqrt());
    let w = y.tr_mul(&y);
    let eig = SymmetricEigen::try_new(w, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("symmetric eigendecomposition did not converge".into()))?;
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut eigenvalues = Vec::new();
    let mut dropped = 0;
    let mut embedding: Vec<Vec<f64>> = Vec::new();
    for &e in order.iter().take(k) {
        let mu = eig.eigenvalues[e];
        if mu <= cfg.degenerate_tol {
            dropped += 1;
            continue;
        }
        let v: Vec<f64> = (0..c).map(|j| eig.eigenvectors[(j, e)] * scale[j]).collect();
        let norm = 1.0 / mu.sqrt();
        embedding.push(
            (0..r)
                .map(|i| (0..c).map(|j| b(i, j) * v[j]).sum::<f64>() / d_r[i] * norm)
                .collect(),
        );
        eigenvalues.push(1.0 - mu);
    }
    if dropped > 0 {
        warn!("transfer cut dropped {dropped} direction(s) with eigenvalue 1");
    }
    if embedding.is_empty() {
        return Ok((vec![0; r], eigenvalues, dropped));
    }

    let dims = embedding.len();
    let mut points = vec![0.0; r * dims];
    for i in 0..r {
        let norm = embedding.iter().map(|col| col[i] * col[i]).sum::<f64>().sqrt();
        for (t, col) in embedding.iter().enumerate() {
            points[i * dims + t] = if norm > 0.0 { col[i] / norm } else { 0.0 };
        }
    }
    let km = KMeansConfig {
        max_iter: cfg.kmeans_max_iter,
        tol: 1e-6,
        init: KMeansInit::PlusPlus,
        n_init: cfg.restarts,
    };
    let fit = lloyd(&points, dims, k.min(r), &km, rng)?;
    Ok((fit.labels, eigenvalues, dropped))
}

/// Partitions a bipartite graph into at most `k` segments. `row_sizes`
/// weights rows when clusters are distributed over components.
pub fn transfer_cut(
    bg: &BipartiteGraph,
    k: usize,
    row_sizes: &[usize],
    cfg: &PtgpConfig,
) -> Result<TcutPartition> {
    let limit = bg.n_rows().min(bg.n_cols());
    if k < 2 || k > limit {
        return Err(Error::param(format!(
            "k = {k} is outside 2..={limit} (min of microcluster and cluster counts)"
        )));
    }
    if row_sizes.len() != bg.n_rows() {
        return Err(Error::input("row size vector does not match the bipartite graph"));
    }
    let blocks = components(bg, row_sizes);
    let mut raw = vec![0usize; bg.n_rows()];
    let mut info = EmbeddingInfo {
        eigenvalues: Vec::new(),
        dropped: 0,
        components: blocks.len(),
        allocation: Vec::new(),
    };

    if blocks.len() >= k {
        let group = group_components(&blocks, k);
        for (c, block) in blocks.iter().enumerate() {
            for &row in &block.rows {
                raw[row] = group[c];
            }
        }
        info.allocation = vec![1; blocks.len()];
    } else {
        let alloc = allocate(&blocks, k);
        let mut next = 0;
        for (c, block) in blocks.iter().enumerate() {
            let local = if alloc[c] > 1 {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(c as u64));
                let (labels, eigs, dropped) = partition_block(bg, block, alloc[c], cfg, &mut rng)?;
                info.eigenvalues.extend(eigs);
                info.dropped += dropped;
                labels
            } else {
                vec![0; block.rows.len()]
            };
            for (&row, &l) in block.rows.iter().zip(&local) {
                raw[row] = next + l;
            }
            next += local.iter().max().map_or(0, |m| m + 1);
        }
        info.allocation = alloc;
    }

    let row_labels = canonical_labels(&raw);
    let segments = row_labels.iter().max().map_or(0, |m| m + 1);
    if segments < k {
        warn!("transfer cut produced {segments} segments for k = {k}");
    }
    let col_labels = (0..bg.n_cols())
        .map(|j| {
            let mut mass = vec![0.0; segments];
            for (i, &s) in row_labels.iter().enumerate() {
                mass[s] += bg.weight(i, j);
            }
            (0..segments)
                .fold((0, f64::NEG_INFINITY), |(bs, bm), s| {
                    if mass[s] > bm {
                        (s, mass[s])
                    } else {
                        (bs, bm)
                    }
                })
                .0
        })
        .collect();
    Ok(TcutPartition {
        row_labels,
        col_labels,
        info,
    })
}

/// Probability trajectory based graph partitioning: transfer cut on the
/// microcluster–cluster graph, mapped back to objects.
pub fn ptgp(
    bg: &BipartiteGraph,
    mcs: &MicroclusterSet,
    k: usize,
    cfg: &PtgpConfig,
) -> Result<ConsensusResult> {
    if bg.n_rows() != mcs.len() {
        return Err(Error::input("bipartite graph rows do not match the microclusters"));
    }
    let part = transfer_cut(bg, k, mcs.sizes(), cfg)?;
    let labels = canonical_labels(&mcs.expand_labels(&part.row_labels));
    Ok(ConsensusResult::new(
        labels,
        k,
        Method::Ptgp,
        Provenance::Embedding(part.info),
    ))
}
