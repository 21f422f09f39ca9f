//! Agglomerative consensus over a dense similarity matrix.
//!
//! Regions start as single microclusters and the most similar pair is merged
//! until one region remains. Region-to-region similarity:
//!
//! | linkage  | similarity of regions `A`, `B`                         |
//! |----------|--------------------------------------------------------|
//! | average  | mean of `S[k][l]` over `k ∈ A`, `l ∈ B`                 |
//! | complete | sum of `S[k][l]` ([`ClSemantics::PaperSum`], default) or their minimum ([`ClSemantics::Min`]) |
//! | single   | max of `S[k][l]`                                       |
//!
//! A region lives in the slot of its smallest microcluster index. Among pairs
//! of equal similarity the lexicographically smallest slot pair `(i, j)`,
//! `i < j`, merges first, which makes the dendrogram deterministic.
//!
//! Each slot caches its best partner among higher slots; after a merge only
//! rows whose cached partner disappeared or got worse are rescanned.

use std::fmt;
use std::str::FromStr;

use crate::dense::SquareMatrix;
use crate::ensemble::MicroclusterSet;
use crate::error::{Error, Result};
use crate::trajectory::PtsMatrix;

use super::{canonical_labels, ConsensusResult, Method, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linkage {
    Average,
    Complete,
    Single,
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Average => "AL",
            Linkage::Complete => "CL",
            Linkage::Single => "SL",
        })
    }
}

/// How complete linkage combines cross-region similarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ClSemantics {
    /// Sum of all cross-region similarities.
    #[default]
    PaperSum,
    /// Minimum cross-region similarity (classical complete link).
    Min,
}

impl FromStr for ClSemantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-sum" => Ok(ClSemantics::PaperSum),
            "min" => Ok(ClSemantics::Min),
            other => Err(Error::param(format!(
                "unknown cl-semantics {other:?} (expected paper-sum or min)"
            ))),
        }
    }
}

impl fmt::Display for ClSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClSemantics::PaperSum => "paper-sum",
            ClSemantics::Min => "min",
        })
    }
}

/// One merge: regions `left` and `right` (ids: leaves `0..n`, merge `t`
/// creates id `n + t`) joined at `similarity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub similarity: f64,
    pub id: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n_leaves: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Leaf labels after the first `n - k` merges, numbered by first
    /// appearance over leaves.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_leaves;
        if k == 0 || k > n {
            return Err(Error::param(format!(
                "cannot cut {n} leaves into {k} clusters"
            )));
        }
        let mut parent: Vec<usize> = (0..2 * n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for m in &self.merges[..n - k] {
            parent[m.left] = m.id;
            parent[m.right] = m.id;
        }
        let roots: Vec<usize> = (0..n).map(|leaf| find(&mut parent, leaf)).collect();
        Ok(canonical_labels(&roots))
    }

    /// CSV with header `left,right,similarity`, one merge per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("left,right,similarity\n");
        for m in &self.merges {
            s.push_str(&format!("{},{},{}\n", m.left, m.right, m.similarity));
        }
        s
    }
}

/// Runs the full agglomeration on a symmetric similarity matrix.
pub fn agglomerate(sim: &SquareMatrix, linkage: Linkage, cl: ClSemantics) -> Dendrogram {
    let n = sim.n();
    let use_sums = matches!(
        (linkage, cl),
        (Linkage::Average, _) | (Linkage::Complete, ClSemantics::PaperSum)
    );
    // `eff` holds the similarity used for merge decisions; `sums` holds raw
    // cross-region sums when average linkage needs them.
    let mut eff = sim.clone();
    let mut sums = (linkage == Linkage::Average).then(|| sim.clone());
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut region = (0..n).collect::<Vec<_>>();
    let mut best: Vec<Option<(f64, usize)>> = vec![None; n];

    let scan = |eff: &SquareMatrix, active: &[bool], i: usize| -> Option<(f64, usize)> {
        let row = eff.row(i);
        let mut out: Option<(f64, usize)> = None;
        for j in i + 1..n {
            if active[j] && out.is_none_or(|(v, _)| row[j] > v) {
                out = Some((row[j], j));
            }
        }
        out
    };
    for i in 0..n {
        best[i] = scan(&eff, &active, i);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for t in 0..n.saturating_sub(1) {
        let mut pick: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            if let Some((v, j)) = best[i] {
                if pick.is_none_or(|(pv, _, _)| v > pv) {
                    pick = Some((v, i, j));
                }
            }
        }
        let (value, a, b) = pick.expect("at least two active regions");
        merges.push(Merge {
            left: region[a],
            right: region[b],
            similarity: value,
            id: n + t,
        });
        region[a] = n + t;
        active[b] = false;
        let (na, nb) = (size[a], size[b]);
        size[a] = na + nb;

        for c in 0..n {
            if !active[c] || c == a {
                continue;
            }
            let v = match linkage {
                Linkage::Average => {
                    let s = sums.as_mut().unwrap();
                    let total = s[(a, c)] + s[(b, c)];
                    s[(a, c)] = total;
                    s[(c, a)] = total;
                    total / (size[a] * size[c]) as f64
                }
                Linkage::Complete if use_sums => eff[(a, c)] + eff[(b, c)],
                Linkage::Complete => eff[(a, c)].min(eff[(b, c)]),
                Linkage::Single => eff[(a, c)].max(eff[(b, c)]),
            };
            eff[(a, c)] = v;
            eff[(c, a)] = v;
        }

        best[b] = None;
        best[a] = scan(&eff, &active, a);
        for c in 0..n {
            if !active[c] || c == a {
                continue;
            }
            match best[c] {
                Some((_, j)) if j == b || (j == a && c < a) => {
                    best[c] = scan(&eff, &active, c);
                }
                _ if c < a => {
                    let v = eff[(c, a)];
                    if best[c].is_none_or(|(bv, bj)| v > bv || (v == bv && a < bj)) {
                        best[c] = Some((v, a));
                    }
                }
                _ => {}
            }
        }
    }
    Dendrogram { n_leaves: n, merges }
}

fn validate_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::param(format!(
            "k = {k} is outside 1..={n} (number of microclusters)"
        )));
    }
    Ok(())
}

/// Agglomerative consensus on a dense microcluster similarity, mapped back to
/// objects. Shared by PTA (on PTS) and the EAC baseline (on co-association).
pub(crate) fn agglomerative_consensus(
    sim: &SquareMatrix,
    mcs: &MicroclusterSet,
    k: usize,
    linkage: Linkage,
    cl: ClSemantics,
    method: Method,
) -> Result<ConsensusResult> {
    validate_k(k, mcs.len())?;
    let dendrogram = agglomerate(sim, linkage, cl);
    let mc_labels = dendrogram.cut(k)?;
    let object_labels = canonical_labels(&mcs.expand_labels(&mc_labels));
    Ok(ConsensusResult::new(
        object_labels,
        k,
        method,
        Provenance::Dendrogram(dendrogram),
    ))
}

/// Probability trajectory accumulation: agglomerative clustering on PTS cut
/// at `k` regions.
pub fn pta(
    pts: &PtsMatrix,
    mcs: &MicroclusterSet,
    k: usize,
    linkage: Linkage,
    cl: ClSemantics,
) -> Result<ConsensusResult> {
    if pts.n() != mcs.len() {
        return Err(Error::input(format!(
            "PTS has {} rows but there are {} microclusters",
            pts.n(),
            mcs.len()
        )));
    }
    agglomerative_consensus(pts.matrix(), mcs, k, linkage, cl, Method::pta(linkage))
}
