#![allow(dead_code)]

use ptcluster::data::FeatureDataset;
use ptcluster::ensemble::Ensemble;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Three overlapping isotropic Gaussian blobs in the plane, classes
/// interleaved, `n / 3` points each.
pub fn three_blobs(n: usize, seed: u64) -> FeatureDataset {
    let centres = [(0.0, 0.0), (4.0, 0.0), (2.0, 3.5)];
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut r = rng(seed);
    let mut values = Vec::with_capacity(2 * n);
    let mut truth = Vec::with_capacity(n);
    for i in 0..n {
        let (cx, cy) = centres[i % 3];
        values.push(cx + noise.sample(&mut r));
        values.push(cy + noise.sample(&mut r));
        truth.push(i % 3);
    }
    FeatureDataset::new(n, 2, values).unwrap().with_truth(truth).unwrap()
}

/// `m` independent uniform labelings of `n` objects, each with up to
/// `max_c` clusters.
pub fn random_ensemble(r: &mut impl Rng, n: usize, m: usize, max_c: i64) -> Ensemble {
    let columns: Vec<Vec<i64>> = (0..m)
        .map(|_| {
            let c = r.random_range(1..=max_c);
            (0..n).map(|_| r.random_range(0..c)).collect()
        })
        .collect();
    Ensemble::from_columns(&columns).unwrap()
}

/// Noisy copies of a planted partition: each object keeps its class with
/// probability `1 - flip` and otherwise takes a random label.
pub fn planted_ensemble(r: &mut impl Rng, n: usize, m: usize, classes: i64, flip: f64) -> Ensemble {
    let columns: Vec<Vec<i64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|i| {
                    if r.random::<f64>() < flip {
                        r.random_range(0..classes + 2)
                    } else {
                        i as i64 % classes
                    }
                })
                .collect()
        })
        .collect();
    Ensemble::from_columns(&columns).unwrap()
}
