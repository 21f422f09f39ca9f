//! Microcluster similarity graphs and elite-neighbor sparsification.
//!
//! The microcluster similarity graph (MSG) links two microclusters whenever
//! their co-association is non-zero. Elite neighbor selection keeps a link
//! when its weight reaches the `K`-th largest incident weight of *either*
//! endpoint, which yields the sparse `K`-elite neighbor graph (K-ENG).
//!
//! Thresholds compare weight values, not ranks: under ties a node may keep
//! more than `K` links. A node with fewer than `K` links keeps all of them.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::ensemble::{CoAssocMatrix, Granularity, MicroclusterSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Msg,
    Keng,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Msg => "MSG",
            GraphKind::Keng => "KENG",
        })
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MSG" => Ok(GraphKind::Msg),
            "KENG" => Ok(GraphKind::Keng),
            other => Err(Error::input(format!("unknown graph kind {other:?}"))),
        }
    }
}

/// An undirected link stored once with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Symmetric weighted graph over microclusters.
///
/// Edges are stored once, sorted by `(u, v)`; a CSR adjacency view provides
/// both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSimGraph {
    kind: GraphKind,
    node_sizes: Vec<usize>,
    n_clusterings: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, f64)>,
}

impl SparseSimGraph {
    /// Builds a graph from an edge list. Edges may be given in either
    /// orientation; self-loops, zero weights and duplicates are rejected.
    pub fn from_edges(
        kind: GraphKind,
        node_sizes: Vec<usize>,
        n_clusterings: usize,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let n = node_sizes.len();
        let mut list: Vec<Edge> = Vec::new();
        for e in edges {
            let (u, v) = (e.u.min(e.v), e.u.max(e.v));
            if u == v {
                return Err(Error::input(format!("self-edge on node {u}")));
            }
            if v >= n {
                return Err(Error::input(format!("edge ({u},{v}) outside {n} nodes")));
            }
            if !(e.weight > 0.0 && e.weight <= 1.0) {
                return Err(Error::input(format!(
                    "edge ({u},{v}) has weight {} outside (0,1]",
                    e.weight
                )));
            }
            list.push(Edge {
                u,
                v,
                weight: e.weight,
            });
        }
        list.sort_by_key(|e| (e.u, e.v));
        if list.windows(2).any(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(Error::input("duplicate edge"));
        }
        Ok(Self::assemble(kind, node_sizes, n_clusterings, list))
    }

    fn assemble(
        kind: GraphKind,
        node_sizes: Vec<usize>,
        n_clusterings: usize,
        edges: Vec<Edge>,
    ) -> Self {
        let n = node_sizes.len();
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0usize, 0.0f64); offsets[n]];
        // Edges are sorted by (u, v), so every neighbor list ends up sorted.
        for e in &edges {
            adjacency[fill[e.u]] = (e.v, e.weight);
            fill[e.u] += 1;
        }
        for e in &edges {
            adjacency[fill[e.v]] = (e.u, e.weight);
            fill[e.v] += 1;
        }
        for i in 0..n {
            adjacency[offsets[i]..offsets[i + 1]].sort_by_key(|&(j, _)| j);
        }
        SparseSimGraph {
            kind,
            node_sizes,
            n_clusterings,
            edges,
            offsets,
            adjacency,
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn n_nodes(&self) -> usize {
        self.node_sizes.len()
    }

    pub fn node_sizes(&self) -> &[usize] {
        &self.node_sizes
    }

    /// Ensemble size `M` the weights are fractions of (0 when unknown).
    pub fn n_clusterings(&self) -> usize {
        self.n_clusterings
    }

    pub fn n_links(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbor, weight)` pairs of node `i`, sorted by neighbor.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let nb = self.neighbors(i);
        nb.binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|p| nb[p].1)
    }

    /// Writes the text edge list: a header `n_nodes <Ñ> kind <MSG|KENG>`
    /// followed by one `i j w` line per link.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n_nodes {} kind {}", self.n_nodes(), self.kind)?;
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.u, e.v, e.weight)?;
        }
        Ok(())
    }

    /// Reads an edge list written by [`write_edge_list`](Self::write_edge_list).
    /// Node sizes are not part of the format and default to 1.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::input("empty edge list"))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (n, kind) = match fields.as_slice() {
            ["n_nodes", n, "kind", kind] => (
                n.parse::<usize>()
                    .map_err(|_| Error::input(format!("bad node count {n:?}")))?,
                kind.parse::<GraphKind>()?,
            ),
            _ => return Err(Error::input(format!("bad edge list header {header:?}"))),
        };
        let mut edges = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::input(format!("bad edge on line {}: {line:?}", lineno + 2));
            if parts.len() != 3 {
                return Err(bad());
            }
            edges.push(Edge {
                u: parts[0].parse().map_err(|_| bad())?,
                v: parts[1].parse().map_err(|_| bad())?,
                weight: parts[2].parse().map_err(|_| bad())?,
            });
        }
        Self::from_edges(kind, vec![1; n], 0, edges)
    }
}

/// Builds the MSG: one link per microcluster pair with non-zero
/// co-association.
pub fn build_msg(mca: &CoAssocMatrix, mcs: &MicroclusterSet) -> SparseSimGraph {
    assert_eq!(mca.granularity(), Granularity::Microcluster);
    assert_eq!(mca.n(), mcs.len());
    let n = mca.n();
    let edges: Vec<Edge> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            (u + 1..n).filter_map(move |v| {
                (mca.count(u, v) > 0).then(|| Edge {
                    u,
                    v,
                    weight: mca.value(u, v),
                })
            })
        })
        .collect();
    SparseSimGraph::assemble(
        GraphKind::Msg,
        mcs.sizes().to_vec(),
        mca.n_clusterings(),
        edges,
    )
}

/// Per-node `K`-elite thresholds; `None` marks an isolated node.
#[derive(Debug, Clone, PartialEq)]
pub struct EliteThresholds {
    k: usize,
    values: Vec<Option<f64>>,
}

impl EliteThresholds {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.values[i]
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// Whether link `(i, j)` with weight `w` survives elite neighbor
    /// selection.
    pub fn keeps(&self, i: usize, j: usize, w: f64) -> bool {
        let reaches = |t: Option<f64>| t.is_some_and(|t| w >= t);
        reaches(self.values[i]) || reaches(self.values[j])
    }
}

/// The `K`-th largest incident weight of every node, or its smallest
/// incident weight when its degree is below `K`.
pub fn elite_thresholds(graph: &SparseSimGraph, k: usize) -> Result<EliteThresholds> {
    if k == 0 {
        return Err(Error::param("elite neighbor count K must be at least 1"));
    }
    let values = (0..graph.n_nodes())
        .into_par_iter()
        .map(|i| {
            let mut w: Vec<f64> = graph.neighbors(i).iter().map(|&(_, w)| w).collect();
            if w.is_empty() {
                return None;
            }
            let rank = k.min(w.len()) - 1;
            let (_, kth, _) = w.select_nth_unstable_by(rank, |a, b| b.total_cmp(a));
            Some(*kth)
        })
        .collect();
    Ok(EliteThresholds { k, values })
}

/// Sparsifies `graph` into its `K`-elite neighbor graph. Kept links retain
/// their original weights.
pub fn build_keng(graph: &SparseSimGraph, k: usize) -> Result<SparseSimGraph> {
    let thresholds = elite_thresholds(graph, k)?;
    let edges = graph
        .edges()
        .iter()
        .filter(|e| thresholds.keeps(e.u, e.v, e.weight))
        .copied()
        .collect();
    Ok(SparseSimGraph::assemble(
        GraphKind::Keng,
        graph.node_sizes().to_vec(),
        graph.n_clusterings(),
        edges,
    ))
}

/// Keeps links with weight at least `threshold`, regardless of node context.
/// Only a comparator for experiments: it can isolate nodes.
pub fn global_threshold(graph: &SparseSimGraph, threshold: f64) -> SparseSimGraph {
    let edges = graph
        .edges()
        .iter()
        .filter(|e| e.weight >= threshold)
        .copied()
        .collect();
    SparseSimGraph::assemble(
        GraphKind::Keng,
        graph.node_sizes().to_vec(),
        graph.n_clusterings(),
        edges,
    )
}

/// Fraction of MSG links preserved in the sparsified graph.
pub fn ratio_pl(msg: &SparseSimGraph, keng: &SparseSimGraph) -> Result<f64> {
    if msg.n_nodes() != keng.n_nodes() {
        return Err(Error::input("graphs have different node sets"));
    }
    if msg.n_links() == 0 {
        return Err(Error::input("RatioPL is undefined for a graph without links"));
    }
    Ok(keng.n_links() as f64 / msg.n_links() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{build_microclusters, compute_mca, Ensemble};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> SparseSimGraph {
        SparseSimGraph::from_edges(
            GraphKind::Msg,
            vec![1; n],
            0,
            edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }),
        )
        .unwrap()
    }

    fn random_graph(n: usize, m: u32, density: f64, seed: u64) -> SparseSimGraph {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(density) {
                    let c = rng.random_range(1..=m);
                    edges.push((u, v, c as f64 / m as f64));
                }
            }
        }
        graph(n, &edges)
    }

    fn link_set(g: &SparseSimGraph) -> Vec<(usize, usize)> {
        g.edges().iter().map(|e| (e.u, e.v)).collect()
    }

    #[test]
    fn eight_object_msg_is_a_chain() {
        let e = Ensemble::from_columns(&[
            vec![1, 1, 1, 1, 2, 2, 2, 2],
            vec![1, 1, 1, 2, 2, 2, 3, 3],
        ])
        .unwrap();
        let mcs = build_microclusters(&e);
        let msg = build_msg(&compute_mca(&e, &mcs), &mcs);
        let edges: Vec<_> = msg.edges().iter().map(|e| (e.u, e.v, e.weight)).collect();
        assert_eq!(edges, vec![(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5)]);
        assert_eq!(msg.node_sizes(), &[3, 1, 2, 2]);
    }

    #[test]
    fn all_agree_msg_is_union_of_cliques() {
        let col = vec![0, 1, 0, 1, 2];
        let e = Ensemble::from_columns(&vec![col; 3]).unwrap();
        let mcs = build_microclusters(&e);
        // Identical copies collapse each cluster into one microcluster.
        assert_eq!(build_msg(&compute_mca(&e, &mcs), &mcs).n_links(), 0);

        let e = Ensemble::from_columns(&[vec![0, 0, 0, 1, 1], vec![0, 1, 2, 3, 3]]).unwrap();
        let mcs = build_microclusters(&e);
        let msg = build_msg(&compute_mca(&e, &mcs), &mcs);
        assert_eq!(link_set(&msg), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(msg.edges().iter().all(|e| e.weight == 0.5));
    }

    #[test]
    fn msg_link_count_matches_dense_upper_triangle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cols: Vec<Vec<i64>> = (0..8)
            .map(|_| (0..100).map(|_| rng.random_range(0..6)).collect())
            .collect();
        let e = Ensemble::from_columns(&cols).unwrap();
        let mcs = build_microclusters(&e);
        let mca = compute_mca(&e, &mcs);
        let dense = mca.to_dense();
        let expected = (0..mcs.len())
            .flat_map(|i| (i + 1..mcs.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| dense[(i, j)] > 0.0)
            .count();
        assert_eq!(build_msg(&mca, &mcs).n_links(), expected);
    }

    #[test]
    fn threshold_order_statistics() {
        let g = graph(
            6,
            &[(0, 1, 0.9), (0, 2, 0.5), (0, 3, 0.5), (0, 4, 0.1), (5, 1, 0.7)],
        );
        let t2 = elite_thresholds(&g, 2).unwrap();
        assert_eq!(t2.get(0), Some(0.5));
        let t8 = elite_thresholds(&g, 8).unwrap();
        assert_eq!(t8.get(5), Some(0.7));
        assert_eq!(t8.get(0), Some(0.1));
        let iso = graph(3, &[(0, 1, 0.4)]);
        assert_eq!(elite_thresholds(&iso, 1).unwrap().get(2), None);
        assert!(elite_thresholds(&g, 0).is_err());
    }

    #[test]
    fn thresholds_match_full_sort() {
        let g = random_graph(60, 10, 0.3, 11);
        for k in [1, 2, 3, 5, 8, 40] {
            let t = elite_thresholds(&g, k).unwrap();
            for i in 0..g.n_nodes() {
                let mut w: Vec<f64> = g.neighbors(i).iter().map(|p| p.1).collect();
                w.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let expect = (!w.is_empty()).then(|| w[k.min(w.len()) - 1]);
                assert_eq!(t.get(i), expect);
            }
        }
    }

    #[test]
    fn equal_weight_path_keeps_everything_at_k1() {
        let g = graph(4, &[(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5)]);
        assert_eq!(build_keng(&g, 1).unwrap().n_links(), 3);
    }

    #[test]
    fn low_degree_and_k_all_preserve_msg() {
        let g = random_graph(40, 10, 0.1, 5);
        let max_degree = (0..40).map(|i| g.degree(i)).max().unwrap();
        let keng = build_keng(&g, max_degree).unwrap();
        assert_eq!(link_set(&keng), link_set(&g));
        let all = build_keng(&g, g.n_nodes() - 1).unwrap();
        assert_eq!(link_set(&all), link_set(&g));
        assert_eq!(ratio_pl(&g, &all).unwrap(), 1.0);
        assert_eq!(ratio_pl(&g, &g).unwrap(), 1.0);
    }

    #[test]
    fn ratio_pl_counts_links() {
        let g = random_graph(300, 10, 0.2, 9);
        let keng = build_keng(&g, 8).unwrap();
        let r = ratio_pl(&g, &keng).unwrap();
        assert_eq!(r, keng.edges().len() as f64 / g.edges().len() as f64);
        assert!(r > 0.0 && r < 1.0);
        assert!(ratio_pl(&graph(3, &[]), &graph(3, &[])).is_err());
    }

    #[test]
    fn global_threshold_can_isolate_where_ens_does_not() {
        let g = graph(4, &[(0, 1, 0.9), (1, 2, 0.8), (2, 3, 0.2)]);
        let global = global_threshold(&g, 0.5);
        assert_eq!(global.degree(3), 0);
        assert!(build_keng(&g, 1).unwrap().degree(3) > 0);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = random_graph(25, 7, 0.3, 2);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert!(buf.starts_with(b"n_nodes 25 kind MSG\n"));
        let back = SparseSimGraph::read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert!(SparseSimGraph::read_edge_list(&b"n_nodes 2 kind X\n"[..]).is_err());
        assert!(SparseSimGraph::read_edge_list(&b"n_nodes 2 kind MSG\n0 0 0.5\n"[..]).is_err());
    }

    proptest! {
        #[test]
        fn ens_invariants(seed in any::<u64>(), n in 2usize..50, k in 1usize..10) {
            let g = random_graph(n, 10, 0.4, seed);
            let t = elite_thresholds(&g, k).unwrap();
            let keng = build_keng(&g, k).unwrap();
            for e in g.edges() {
                prop_assert_eq!(t.keeps(e.u, e.v, e.weight), t.keeps(e.v, e.u, e.weight));
            }
            for i in 0..n {
                if g.degree(i) > 0 {
                    prop_assert!(keng.degree(i) > 0);
                }
                for &(j, w) in keng.neighbors(i) {
                    prop_assert_eq!(keng.weight(j, i), Some(w));
                    prop_assert_eq!(g.weight(i, j), Some(w));
                }
            }
            let bigger = build_keng(&g, k + 1).unwrap();
            let sup = link_set(&bigger);
            prop_assert!(link_set(&keng).iter().all(|l| sup.binary_search(l).is_ok()));
        }
    }
}
