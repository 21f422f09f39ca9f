//! Consensus functions turning a microcluster similarity into an
//! object-level clustering.
//!
//! * [`pta`] cuts an agglomerative dendrogram built on PTS.
//! * [`ptgp`] partitions the microcluster–cluster bipartite graph whose
//!   weights are averaged PTS values ([`sim_mc`]).

mod agglomerative;
mod bipartite;
mod tcut;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

pub use agglomerative::{agglomerate, pta, ClSemantics, Dendrogram, Linkage, Merge};
pub(crate) use agglomerative::agglomerative_consensus;
pub use bipartite::{sim_mc, BipartiteGraph};
pub use tcut::{ptgp, transfer_cut, EmbeddingInfo, PtgpConfig, TcutPartition};

use crate::error::{Error, Result};

/// Consensus method, including the EAC baseline variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    PtaAl,
    PtaCl,
    PtaSl,
    Ptgp,
    EacAl,
    EacCl,
    EacSl,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::PtaAl,
        Method::PtaCl,
        Method::PtaSl,
        Method::Ptgp,
        Method::EacAl,
        Method::EacCl,
        Method::EacSl,
    ];

    pub fn pta(linkage: Linkage) -> Method {
        match linkage {
            Linkage::Average => Method::PtaAl,
            Linkage::Complete => Method::PtaCl,
            Linkage::Single => Method::PtaSl,
        }
    }

    pub fn eac(linkage: Linkage) -> Method {
        match linkage {
            Linkage::Average => Method::EacAl,
            Linkage::Complete => Method::EacCl,
            Linkage::Single => Method::EacSl,
        }
    }

    /// Linkage of the agglomerative methods; `None` for PTGP.
    pub fn linkage(self) -> Option<Linkage> {
        match self {
            Method::PtaAl | Method::EacAl => Some(Linkage::Average),
            Method::PtaCl | Method::EacCl => Some(Linkage::Complete),
            Method::PtaSl | Method::EacSl => Some(Linkage::Single),
            Method::Ptgp => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::PtaAl => "pta-al",
            Method::PtaCl => "pta-cl",
            Method::PtaSl => "pta-sl",
            Method::Ptgp => "ptgp",
            Method::EacAl => "eac-al",
            Method::EacCl => "eac-cl",
            Method::EacSl => "eac-sl",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param(format!("unknown method {s:?}")))
    }
}

/// How a consensus clustering was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Dendrogram(Dendrogram),
    Embedding(EmbeddingInfo),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusResult {
    object_labels: Vec<usize>,
    k: usize,
    n_clusters: usize,
    method: Method,
    provenance: Provenance,
}

impl ConsensusResult {
    pub(crate) fn new(
        object_labels: Vec<usize>,
        k: usize,
        method: Method,
        provenance: Provenance,
    ) -> Self {
        let n_clusters = object_labels.iter().max().map_or(0, |m| m + 1);
        ConsensusResult {
            object_labels,
            k,
            n_clusters,
            method,
            provenance,
        }
    }

    /// Dense labels `0..n_clusters`, numbered by first appearance.
    pub fn labels(&self) -> &[usize] {
        &self.object_labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.object_labels
    }

    /// Requested number of clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of clusters actually produced (at most `k`).
    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn dendrogram(&self) -> Option<&Dendrogram> {
        match &self.provenance {
            Provenance::Dendrogram(d) => Some(d),
            Provenance::Embedding(_) => None,
        }
    }
}

/// Relabels values densely by order of first appearance.
pub fn canonical_labels<T: Copy + Eq + Hash>(labels: &[T]) -> Vec<usize> {
    let mut index = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = index.len();
            *index.entry(l).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("pta".parse::<Method>().is_err());
    }

    #[test]
    fn canonical_relabel() {
        assert_eq!(canonical_labels(&[5, 5, 2, 9, 2]), vec![0, 0, 1, 2, 1]);
    }
}
