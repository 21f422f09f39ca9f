//! Ensemble clustering with elite-neighbor sparsification and
//! random-walk probability trajectories.
//!
//! The usual entry point is [`pipeline::Pipeline`]:
//!
//! ```
//! use ptcluster::consensus::Method;
//! use ptcluster::ensemble::Ensemble;
//! use ptcluster::pipeline::{ConsensusOptions, ParamSpec, Pipeline};
//!
//! let ensemble = Ensemble::from_columns(&[vec![0, 0, 1, 1], vec![2, 2, 2, 3]])?;
//! let pipeline = Pipeline::prepare(ensemble, ParamSpec::Auto, ParamSpec::Auto)?;
//! let labels = pipeline.consensus(Method::Ptgp, 2, &ConsensusOptions::default())?;
//! assert_eq!(labels.labels().len(), 4);
//! # Ok::<(), ptcluster::error::Error>(())
//! ```
//!
//! The stages are also available one by one: [`ensemble`] for microclusters
//! and co-association, [`graph`] for the sparse graphs, [`trajectory`] for
//! the walk and PTS, and [`consensus`] for PTA and PTGP. [`pool`],
//! [`metrics`] and [`audit`] generate and score ensembles.

pub mod consensus;
pub mod data;
pub mod dense;
pub mod ensemble;
pub mod error;
pub mod graph;
pub mod kmeans;
pub mod trajectory;
pub mod audit;
pub mod eac;
pub mod metrics;
pub mod pool;
pub mod rpcl;
pub mod io;
pub mod pipeline;

// Book chapters, compiled as doc-tests so the guide cannot drift.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/trajectories.md")]
    mod trajectories {}
    #[doc = include_str!("../../../book/src/consensus.md")]
    mod consensus {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
