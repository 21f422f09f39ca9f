//! Lloyd's k-means.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::consensus::canonical_labels;
use crate::data::{sq_dist, FeatureDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMeansInit {
    /// Distinct data points chosen uniformly.
    Random,
    /// k-means++ seeding.
    PlusPlus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub max_iter: usize,
    /// Stop when the total centroid shift falls below `tol` times the
    /// centroid norm.
    pub tol: f64,
    pub init: KMeansInit,
    /// Independent restarts; the lowest-inertia fit wins.
    pub n_init: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            max_iter: 100,
            tol: 1e-6,
            init: KMeansInit::Random,
            n_init: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    /// Dense labels numbered by first appearance.
    pub labels: Vec<usize>,
    /// `c × d`, row-major, indexed by raw centroid slot.
    pub centroids: Vec<f64>,
    pub inertia: f64,
    pub iterations: usize,
}

fn init_centroids(points: &[f64], n: usize, d: usize, c: usize, init: KMeansInit, rng: &mut impl Rng) -> Vec<f64> {
    let row = |i: usize| &points[i * d..(i + 1) * d];
    let mut centroids = Vec::with_capacity(c * d);
    match init {
        KMeansInit::Random => {
            let mut picks = sample(rng, n, c).into_vec();
            picks.sort_unstable();
            for i in picks {
                centroids.extend_from_slice(row(i));
            }
        }
        KMeansInit::PlusPlus => {
            let first = rng.random_range(0..n);
            centroids.extend_from_slice(row(first));
            let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(row(i), row(first))).collect();
            for _ in 1..c {
                let total: f64 = dist.iter().sum();
                let pick = if total > 0.0 {
                    let mut target = rng.random::<f64>() * total;
                    let mut chosen = n - 1;
                    for (i, &w) in dist.iter().enumerate() {
                        if target < w {
                            chosen = i;
                            break;
                        }
                        target -= w;
                    }
                    chosen
                } else {
                    rng.random_range(0..n)
                };
                centroids.extend_from_slice(row(pick));
                for (i, slot) in dist.iter_mut().enumerate() {
                    *slot = slot.min(sq_dist(row(i), row(pick)));
                }
            }
        }
    }
    centroids
}

fn single_run(points: &[f64], n: usize, d: usize, c: usize, cfg: &KMeansConfig, rng: &mut impl Rng) -> KMeansFit {
    let row = |i: usize| &points[i * d..(i + 1) * d];
    let mut centroids = init_centroids(points, n, d, c, cfg.init, rng);
    let mut labels = vec![0usize; n];
    let mut dist = vec![0.0f64; n];
    let mut iterations = 0;

    let assign = |centroids: &[f64], labels: &mut [usize], dist: &mut [f64]| {
        for i in 0..n {
            let (mut best, mut bd) = (0, f64::INFINITY);
            for k in 0..c {
                let dk = sq_dist(row(i), &centroids[k * d..(k + 1) * d]);
                if dk < bd {
                    best = k;
                    bd = dk;
                }
            }
            labels[i] = best;
            dist[i] = bd;
        }
    };

    for _ in 0..cfg.max_iter {
        iterations += 1;
        assign(&centroids, &mut labels, &mut dist);
        let mut next = vec![0.0; c * d];
        let mut counts = vec![0usize; c];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (acc, x) in next[labels[i] * d..(labels[i] + 1) * d].iter_mut().zip(row(i)) {
                *acc += x;
            }
        }
        for k in 0..c {
            if counts[k] == 0 {
                // Reseed from the point farthest from its centroid.
                let far = (0..n)
                    .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
                    .unwrap();
                next[k * d..(k + 1) * d].copy_from_slice(row(far));
                dist[far] = -1.0;
            } else {
                for v in &mut next[k * d..(k + 1) * d] {
                    *v /= counts[k] as f64;
                }
            }
        }
        let shift: f64 = sq_dist(&centroids, &next).sqrt();
        let norm: f64 = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        centroids = next;
        if shift <= cfg.tol * norm.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    assign(&centroids, &mut labels, &mut dist);
    KMeansFit {
        labels: canonical_labels(&labels),
        centroids,
        inertia: dist.iter().sum(),
        iterations,
    }
}

/// Runs k-means on `n` points of dimension `d` stored row-major.
pub fn lloyd(points: &[f64], d: usize, c: usize, cfg: &KMeansConfig, rng: &mut impl Rng) -> Result<KMeansFit> {
    if d == 0 || !points.len().is_multiple_of(d) {
        return Err(Error::input("point buffer is not a multiple of the dimension"));
    }
    let n = points.len() / d;
    if c == 0 || c > n {
        return Err(Error::param(format!("cannot form {c} clusters from {n} points")));
    }
    let mut best: Option<KMeansFit> = None;
    for _ in 0..cfg.n_init.max(1) {
        let fit = single_run(points, n, d, c, cfg, rng);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.unwrap())
}

/// Single-initialization k-means with the default configuration.
pub fn kmeans(data: &FeatureDataset, c: usize, seed: u64) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(lloyd(data.values(), data.dim(), c, &KMeansConfig::default(), &mut rng)?.labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blobs() -> (FeatureDataset, Vec<usize>) {
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for i in 0..40 {
            let t = (i % 7) as f64 * 0.1;
            if i % 2 == 0 {
                rows.push(vec![t, -t]);
            } else {
                rows.push(vec![10.0 + t, 10.0 - t]);
            }
            truth.push(i % 2);
        }
        (FeatureDataset::from_rows(&rows).unwrap(), truth)
    }

    #[test]
    fn separates_blobs() {
        let (data, truth) = two_blobs();
        let cfg = KMeansConfig {
            init: KMeansInit::PlusPlus,
            n_init: 5,
            ..Default::default()
        };
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fit = lloyd(data.values(), 2, 2, &cfg, &mut rng).unwrap();
            assert_eq!(fit.labels, canonical_labels(&truth));
        }
    }

    #[test]
    fn one_cluster_and_bounds() {
        let (data, _) = two_blobs();
        assert!(kmeans(&data, 1, 0).unwrap().iter().all(|&l| l == 0));
        assert!(kmeans(&data, 41, 0).is_err());
        assert!(kmeans(&data, 0, 0).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let (data, _) = two_blobs();
        assert_eq!(kmeans(&data, 5, 9).unwrap(), kmeans(&data, 5, 9).unwrap());
    }

    #[test]
    fn duplicate_points_repair_empty_clusters() {
        let mut pts = vec![0.0; 20];
        pts.extend([5.0, 5.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = KMeansConfig {
            init: KMeansInit::PlusPlus,
            n_init: 3,
            ..Default::default()
        };
        let fit = lloyd(&pts, 2, 3, &cfg, &mut rng).unwrap();
        assert_eq!(fit.labels.len(), 11);
        assert_ne!(fit.labels[0], fit.labels[10]);
    }
}
