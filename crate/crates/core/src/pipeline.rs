//! End-to-end wiring: ensemble → microclusters → MSG → K-ENG → PTS →
//! consensus.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use log::info;

use crate::consensus::{pta, ptgp, sim_mc, ClSemantics, ConsensusResult, Method, PtgpConfig};
use crate::eac::eac_baseline;
use crate::ensemble::{build_microclusters, compute_mca, Ensemble, MicroclusterSet};
use crate::error::{Error, Result};
use crate::graph::{build_keng, build_msg, ratio_pl, SparseSimGraph};
use crate::trajectory::{build_transition, compute_pts, default_parameter, PtsMatrix, TransitionMatrix};

/// How `K` or `T` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParamSpec {
    /// `floor(sqrt(Ñ)/2)`, at least 1.
    #[default]
    Auto,
    /// `Ñ − 1`: every MSG link survives elite selection.
    All,
    Fixed(usize),
}

impl ParamSpec {
    pub fn resolve(self, n_microclusters: usize) -> Result<usize> {
        match self {
            ParamSpec::Auto => Ok(default_parameter(n_microclusters)),
            ParamSpec::All => Ok(n_microclusters.saturating_sub(1).max(1)),
            ParamSpec::Fixed(0) => Err(Error::param("K and T must be at least 1")),
            ParamSpec::Fixed(v) => Ok(v),
        }
    }
}

impl FromStr for ParamSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(ParamSpec::Auto),
            "all" => Ok(ParamSpec::All),
            v => v
                .parse()
                .map(ParamSpec::Fixed)
                .map_err(|_| Error::param(format!("expected \"auto\", \"all\" or a count, got {s:?}"))),
        }
    }
}

impl fmt::Display for ParamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSpec::Auto => f.write_str("auto"),
            ParamSpec::All => f.write_str("all"),
            ParamSpec::Fixed(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConsensusOptions {
    pub cl: ClSemantics,
    pub ptgp: PtgpConfig,
}

/// Everything up to the transition matrix, with PTS computed on demand.
#[derive(Debug)]
pub struct Pipeline {
    ensemble: Ensemble,
    microclusters: MicroclusterSet,
    msg: SparseSimGraph,
    keng: SparseSimGraph,
    transition: TransitionMatrix,
    k_elite: usize,
    steps: usize,
    pts: OnceLock<PtsMatrix>,
}

impl Pipeline {
    pub fn prepare(ensemble: Ensemble, k_elite: ParamSpec, steps: ParamSpec) -> Result<Self> {
        let microclusters = build_microclusters(&ensemble);
        let n = microclusters.len();
        let k_elite = k_elite.resolve(n)?;
        let steps = match steps {
            ParamSpec::All => return Err(Error::param("T has no \"all\" setting")),
            s => s.resolve(n)?,
        };
        let msg = build_msg(&compute_mca(&ensemble, &microclusters), &microclusters);
        let keng = build_keng(&msg, k_elite)?;
        let transition = build_transition(&keng);
        info!(
            "{} objects, {n} microclusters, K = {k_elite}, T = {steps}, {} of {} links kept",
            ensemble.n_objects(),
            keng.n_links(),
            msg.n_links()
        );
        Ok(Pipeline {
            ensemble,
            microclusters,
            msg,
            keng,
            transition,
            k_elite,
            steps,
            pts: OnceLock::new(),
        })
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn microclusters(&self) -> &MicroclusterSet {
        &self.microclusters
    }

    pub fn msg(&self) -> &SparseSimGraph {
        &self.msg
    }

    pub fn keng(&self) -> &SparseSimGraph {
        &self.keng
    }

    pub fn transition(&self) -> &TransitionMatrix {
        &self.transition
    }

    pub fn k_elite(&self) -> usize {
        self.k_elite
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn ratio_pl(&self) -> f64 {
        ratio_pl(&self.msg, &self.keng).unwrap_or(1.0)
    }

    /// Installs a precomputed PTS matrix, e.g. one loaded from a cache.
    pub fn set_pts(&self, pts: PtsMatrix) -> Result<()> {
        if pts.n() != self.microclusters.len() || pts.steps() != self.steps {
            return Err(Error::input("cached PTS does not match this pipeline"));
        }
        let _ = self.pts.set(pts);
        Ok(())
    }

    pub fn pts_if_computed(&self) -> Option<&PtsMatrix> {
        self.pts.get()
    }

    pub fn pts(&self) -> Result<&PtsMatrix> {
        if let Some(p) = self.pts.get() {
            return Ok(p);
        }
        let p = compute_pts(&self.transition, self.steps)?;
        Ok(self.pts.get_or_init(|| p))
    }

    pub fn consensus(&self, method: Method, k: usize, opts: &ConsensusOptions) -> Result<ConsensusResult> {
        match method {
            Method::PtaAl | Method::PtaCl | Method::PtaSl => pta(
                self.pts()?,
                &self.microclusters,
                k,
                method.linkage().expect("PTA methods have a linkage"),
                opts.cl,
            ),
            Method::Ptgp => {
                let bg = sim_mc(self.pts()?, &self.microclusters, &self.ensemble)?;
                ptgp(&bg, &self.microclusters, k, &opts.ptgp)
            }
            Method::EacAl | Method::EacCl | Method::EacSl => eac_baseline(
                &self.ensemble,
                k,
                method.linkage().expect("EAC methods have a linkage"),
                opts.cl,
            ),
        }
    }
}
