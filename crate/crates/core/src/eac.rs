//! Evidence accumulation baseline: agglomerative clustering directly on the
//! microcluster co-association matrix.

use crate::consensus::{agglomerative_consensus, ClSemantics, ConsensusResult, Linkage, Method};
use crate::ensemble::{build_microclusters, compute_mca, Ensemble};
use crate::error::Result;

pub fn eac_baseline(
    ensemble: &Ensemble,
    k: usize,
    linkage: Linkage,
    cl: ClSemantics,
) -> Result<ConsensusResult> {
    let mcs = build_microclusters(ensemble);
    let sim = compute_mca(ensemble, &mcs).to_dense();
    agglomerative_consensus(&sim, &mcs, k, linkage, cl, Method::eac(linkage))
}
