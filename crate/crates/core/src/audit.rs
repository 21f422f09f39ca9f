//! Reliability of co-association links against ground truth.
//!
//! Every object pair with a nonzero co-association weight is a link. A link is
//! correct when both objects share a ground-truth class. Microcluster links
//! stand for `ñ_i·ñ_j` object links, and pairs inside one microcluster are
//! links of weight 1.

use std::fmt::Write as _;

use crate::consensus::canonical_labels;
use crate::ensemble::MicroclusterSet;
use crate::error::{Error, Result};
use crate::graph::SparseSimGraph;

/// Object links of weight `m / M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightBucket {
    /// Number of base clusterings agreeing, `1..=M`.
    pub agreements: usize,
    pub weight: f64,
    pub links: u64,
    pub correct: u64,
    /// Share of all links in this bucket.
    pub link_fraction: f64,
    /// `correct / links`, `None` for empty buckets.
    pub correct_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub n_clusterings: usize,
    pub total_links: u64,
    pub buckets: Vec<WeightBucket>,
}

impl AuditReport {
    /// True when the correct rate never drops from one non-empty bucket to
    /// the next heavier one.
    pub fn is_non_decreasing(&self) -> bool {
        let rates: Vec<f64> = self.buckets.iter().filter_map(|b| b.correct_rate).collect();
        rates.windows(2).all(|w| w[0] <= w[1])
    }

    /// `weight,links,link_fraction,correct,correct_rate` rows, lightest
    /// bucket first. Empty buckets leave the rate blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,links,link_fraction,correct,correct_rate\n");
        for b in &self.buckets {
            let rate = b.correct_rate.map(|r| format!("{r:.6}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{:.6},{},{:.6},{},{}",
                b.weight, b.links, b.link_fraction, b.correct, rate
            );
        }
        out
    }
}

pub fn link_audit(msg: &SparseSimGraph, mcs: &MicroclusterSet, truth: &[usize]) -> Result<AuditReport> {
    if truth.len() != mcs.n_objects() {
        return Err(Error::input(format!(
            "{} ground-truth labels for {} objects",
            truth.len(),
            mcs.n_objects()
        )));
    }
    if msg.n_nodes() != mcs.len() {
        return Err(Error::input("graph nodes do not match the microclusters"));
    }
    let m = mcs.n_clusterings();
    let truth = canonical_labels(truth);
    let classes = truth.iter().max().map_or(0, |c| c + 1);
    let mut hist = vec![vec![0u64; classes]; mcs.len()];
    for (&mc, &t) in mcs.assignment().iter().zip(&truth) {
        hist[mc][t] += 1;
    }
    let mut links = vec![0u64; m + 1];
    let mut correct = vec![0u64; m + 1];
    for (i, h) in hist.iter().enumerate() {
        let s = mcs.sizes()[i] as u64;
        links[m] += s * (s - 1) / 2;
        correct[m] += h.iter().map(|&c| c * c.saturating_sub(1) / 2).sum::<u64>();
    }
    for e in msg.edges() {
        let bucket = (e.weight * m as f64).round() as usize;
        let (si, sj) = (mcs.sizes()[e.u] as u64, mcs.sizes()[e.v] as u64);
        links[bucket] += si * sj;
        correct[bucket] += hist[e.u].iter().zip(&hist[e.v]).map(|(a, b)| a * b).sum::<u64>();
    }
    let total: u64 = links.iter().sum();
    let buckets = (1..=m)
        .map(|a| WeightBucket {
            agreements: a,
            weight: a as f64 / m as f64,
            links: links[a],
            correct: correct[a],
            link_fraction: if total > 0 { links[a] as f64 / total as f64 } else { 0.0 },
            correct_rate: (links[a] > 0).then(|| correct[a] as f64 / links[a] as f64),
        })
        .collect();
    Ok(AuditReport {
        n_clusterings: m,
        total_links: total,
        buckets,
    })
}
