//! Rival penalized competitive learning.
//!
//! Each sample pulls its nearest unit (the winner) closer and pushes the
//! second-nearest unit (the rival) away. Units that stop winning samples are
//! pruned between epochs, so the number of clusters can shrink below the
//! initial unit count.

use log::warn;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::consensus::canonical_labels;
use crate::data::{sq_dist, FeatureDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpclConfig {
    /// Winner learning rate.
    pub alpha_w: f64,
    /// Rival de-learning rate. Zero turns pruning off.
    pub alpha_r: f64,
    pub epochs: usize,
    /// Units winning fewer than this fraction of samples in an epoch are
    /// pruned.
    pub prune_fraction: f64,
}

impl Default for RpclConfig {
    fn default() -> Self {
        RpclConfig {
            alpha_w: 0.05,
            alpha_r: 0.002,
            epochs: 50,
            prune_fraction: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpclFit {
    /// Dense labels numbered by first appearance.
    pub labels: Vec<usize>,
    /// Units alive at the end of training.
    pub units: usize,
}

/// Nearest and second-nearest alive units.
fn winner_and_rival(x: &[f64], units: &[Vec<f64>], alive: &[bool]) -> (usize, Option<usize>) {
    let (mut w, mut wd) = (usize::MAX, f64::INFINITY);
    let (mut r, mut rd) = (None, f64::INFINITY);
    for (k, u) in units.iter().enumerate().filter(|(k, _)| alive[*k]) {
        let d = sq_dist(x, u);
        if d < wd {
            if w != usize::MAX {
                (r, rd) = (Some(w), wd);
            }
            (w, wd) = (k, d);
        } else if d < rd {
            (r, rd) = (Some(k), d);
        }
    }
    (w, r)
}

pub fn rpcl_fit(data: &FeatureDataset, c_init: usize, cfg: &RpclConfig, seed: u64) -> Result<RpclFit> {
    let n = data.n();
    if c_init < 2 || c_init > n {
        return Err(Error::param(format!(
            "initial unit count {c_init} is outside 2..={n}"
        )));
    }
    if !(0.0 < cfg.alpha_w && cfg.alpha_w < 1.0 && 0.0 <= cfg.alpha_r && cfg.alpha_r < cfg.alpha_w) {
        return Err(Error::param(format!(
            "RPCL rates need 0 <= alpha_r < alpha_w < 1, got alpha_w = {}, alpha_r = {}",
            cfg.alpha_w, cfg.alpha_r
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, n, c_init).into_vec();
    picks.sort_unstable();
    let mut units: Vec<Vec<f64>> = picks.iter().map(|&i| data.row(i).to_vec()).collect();
    let mut alive = vec![true; c_init];
    let mut order: Vec<usize> = (0..n).collect();
    let min_wins = cfg.prune_fraction * n as f64;

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut wins = vec![0usize; c_init];
        for &i in &order {
            let x = data.row(i);
            let (w, r) = winner_and_rival(x, &units, &alive);
            wins[w] += 1;
            for (u, xv) in units[w].iter_mut().zip(x) {
                *u += cfg.alpha_w * (xv - *u);
            }
            if let (Some(r), true) = (r, cfg.alpha_r > 0.0) {
                for (u, xv) in units[r].iter_mut().zip(x) {
                    *u -= cfg.alpha_r * (xv - *u);
                }
            }
        }
        if cfg.alpha_r > 0.0 {
            for k in 0..c_init {
                if alive[k] && (wins[k] as f64) < min_wins {
                    alive[k] = false;
                }
            }
        }
        if !alive.contains(&true) {
            warn!("RPCL pruned every unit; falling back to a single cluster");
            return Ok(RpclFit {
                labels: vec![0; n],
                units: 1,
            });
        }
    }
    let raw: Vec<usize> = (0..n).map(|i| winner_and_rival(data.row(i), &units, &alive).0).collect();
    Ok(RpclFit {
        labels: canonical_labels(&raw),
        units: alive.iter().filter(|&&a| a).count(),
    })
}

/// Labels by nearest surviving unit.
pub fn rpcl(data: &FeatureDataset, c_init: usize, cfg: &RpclConfig, seed: u64) -> Result<Vec<usize>> {
    Ok(rpcl_fit(data, c_init, cfg, seed)?.labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::nmi;
    use rand_distr::{Distribution, Normal};

    fn blobs(seed: u64) -> (FeatureDataset, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.5).unwrap();
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for i in 0..200 {
            let c = i % 2;
            let centre = if c == 0 { -5.0 } else { 5.0 };
            rows.push(vec![centre + noise.sample(&mut rng), noise.sample(&mut rng)]);
            truth.push(c);
        }
        (FeatureDataset::from_rows(&rows).unwrap(), truth)
    }

    #[test]
    fn unit_count_never_grows() {
        for seed in 0..5 {
            let (data, truth) = blobs(seed);
            let fit = rpcl_fit(&data, 5, &RpclConfig::default(), seed).unwrap();
            assert!(fit.units <= 5);
            let produced = fit.labels.iter().max().unwrap() + 1;
            assert!(produced <= fit.units);
            if produced == 2 {
                assert_eq!(nmi(&fit.labels, &truth).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn rival_penalty_shrinks_units() {
        let (data, _) = blobs(3);
        let cfg = RpclConfig {
            alpha_r: 0.02,
            ..Default::default()
        };
        let shrunk = (0..10)
            .filter(|&s| rpcl_fit(&data, 6, &cfg, s).unwrap().units < 6)
            .count();
        assert!(shrunk > 0);
    }

    #[test]
    fn zero_rival_rate_keeps_all_units() {
        let (data, _) = blobs(1);
        let cfg = RpclConfig {
            alpha_r: 0.0,
            ..Default::default()
        };
        assert_eq!(rpcl_fit(&data, 4, &cfg, 2).unwrap().units, 4);
    }

    #[test]
    fn deterministic_and_validated() {
        let (data, _) = blobs(0);
        let cfg = RpclConfig::default();
        assert_eq!(rpcl(&data, 4, &cfg, 9).unwrap(), rpcl(&data, 4, &cfg, 9).unwrap());
        assert!(rpcl(&data, 1, &cfg, 0).is_err());
        let bad = RpclConfig {
            alpha_r: 0.1,
            alpha_w: 0.05,
            ..Default::default()
        };
        assert!(rpcl(&data, 3, &bad, 0).is_err());
    }
}
