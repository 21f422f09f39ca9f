//! Pools of base clusterings generated from feature data.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::FeatureDataset;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::kmeans::kmeans;
use crate::rpcl::{rpcl, RpclConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    KMeans,
    Rpcl,
}

/// Metadata of one pooled clustering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoolMember {
    pub algorithm: Generator,
    /// Cluster count (k-means) or initial unit count (RPCL).
    pub requested_clusters: usize,
    pub produced_clusters: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringPool {
    n_objects: usize,
    labelings: Vec<Vec<usize>>,
    members: Vec<PoolMember>,
}

/// Largest cluster count drawn for pool members: `min(floor(sqrt(N)/2), 50)`.
pub fn cluster_upper_bound(n_objects: usize) -> usize {
    (n_objects.isqrt() / 2).min(50)
}

impl ClusteringPool {
    pub fn len(&self) -> usize {
        self.labelings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labelings.is_empty()
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn labeling(&self, i: usize) -> &[usize] {
        &self.labelings[i]
    }

    pub fn members(&self) -> &[PoolMember] {
        &self.members
    }

    /// Ensemble made of the given pool members, in the given order.
    pub fn ensemble(&self, indices: &[usize]) -> Result<Ensemble> {
        let columns: Vec<Vec<i64>> = indices
            .iter()
            .map(|&i| {
                self.labelings
                    .get(i)
                    .map(|l| l.iter().map(|&x| x as i64).collect())
                    .ok_or_else(|| Error::param(format!("pool has no member {i}")))
            })
            .collect::<Result<_>>()?;
        Ensemble::from_columns(&columns)
    }

    /// Draws `m` distinct members uniformly at random. Returns the ensemble
    /// and the chosen member indices in ascending order.
    pub fn draw_ensemble(&self, m: usize, seed: u64) -> Result<(Ensemble, Vec<usize>)> {
        if m == 0 || m > self.len() {
            return Err(Error::param(format!(
                "cannot draw {m} base clusterings from a pool of {}",
                self.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks = sample(&mut rng, self.len(), m).into_vec();
        picks.sort_unstable();
        Ok((self.ensemble(&picks)?, picks))
    }
}

/// Builds `pool_size` clusterings, the first half by k-means and the second
/// half by RPCL, each with a cluster count drawn uniformly from
/// `2..=cluster_upper_bound(N)`.
pub fn build_pool(data: &FeatureDataset, pool_size: usize, seed: u64) -> Result<ClusteringPool> {
    build_pool_with(data, pool_size, seed, &RpclConfig::default())
}

pub fn build_pool_with(
    data: &FeatureDataset,
    pool_size: usize,
    seed: u64,
    rpcl_cfg: &RpclConfig,
) -> Result<ClusteringPool> {
    if pool_size == 0 || !pool_size.is_multiple_of(2) {
        return Err(Error::param(format!("pool size must be even and positive, got {pool_size}")));
    }
    let ub = cluster_upper_bound(data.n());
    if ub < 2 {
        return Err(Error::param(format!(
            "{} objects are too few for a pool (need at least 16)",
            data.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan: Vec<(Generator, usize, u64)> = (0..pool_size)
        .map(|i| {
            let algorithm = if i < pool_size / 2 { Generator::KMeans } else { Generator::Rpcl };
            (algorithm, rng.random_range(2..=ub), rng.random())
        })
        .collect();
    let runs: Vec<Vec<usize>> = plan
        .par_iter()
        .map(|&(algorithm, c, s)| match algorithm {
            Generator::KMeans => kmeans(data, c, s),
            Generator::Rpcl => rpcl(data, c, rpcl_cfg, s),
        })
        .collect::<Result<_>>()?;
    let members = plan
        .iter()
        .zip(&runs)
        .map(|(&(algorithm, c, s), labels)| PoolMember {
            algorithm,
            requested_clusters: c,
            produced_clusters: labels.iter().max().map_or(0, |m| m + 1),
            seed: s,
        })
        .collect();
    Ok(ClusteringPool {
        n_objects: data.n(),
        labelings: runs,
        members,
    })
}
