//! Peering capacity graphs built from PeeringDB snapshots.
//!
//! A snapshot lists networks (ASes), exchanges (IXPs) and the router ports
//! networks hold at exchanges. [`cgraph::CGraph`] turns it into a weighted,
//! directed bipartite graph whose edge weights are port sizes oriented by
//! each network's declared traffic ratio. On top of that graph the crate
//! provides:
//!
//! * structural metrics: weighted degrees, IXP balance, degree
//!   distributions, power-law and breakpoint fits ([`cgraph`]);
//! * Google matrix, PageRank / reverse PageRank and the reduced Google
//!   matrix of a node subset obtained by stochastic complementation
//!   ([`spectral`]);
//! * country classification, hypergiant and traffic-receiver extraction,
//!   parameter stability sweeps ([`analysis`]);
//! * Louvain community detection with bipartite modularity ([`clustering`]).
//!
//! The `peergraph` binary wires these into a command line pipeline.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cgraph;
pub mod cli;
pub mod clustering;
mod error;
pub mod ingest;
pub mod spectral;
pub mod synthetic;

pub use error::{Error, Result};
