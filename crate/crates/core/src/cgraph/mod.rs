//! The weighted, directed bipartite AS-IXP graph.
//!
//! Nodes are ASes (sorted by AS number) followed by IXPs (sorted by id), so
//! node index `i < n_as()` is an AS and the rest are IXPs. Each AS-IXP pair
//! carries one undirected edge whose port size `ps` is the sum of the AS's
//! router ports at that IXP. The directed weight matrix `W` has `W[i][j]`
//! equal to the weight of the link `j -> i`:
//!
//! | AS class           | `W[as][ixp]` (IXP -> AS) | `W[ixp][as]` (AS -> IXP) |
//! |--------------------|--------------------------|--------------------------|
//! | inbound (HI, MI)   | `ps`                     | `(1 - beta) ps`          |
//! | outbound (HO, MO)  | `(1 - beta) ps`          | `ps`                     |
//! | B, ND              | `ps`                     | `(1 - beta_b) ps`        |
//!
//! with `beta` taken from [`BetaParams`] for the class.

mod fit;
mod io;
mod metrics;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::ingest::{IxpRecord, NetworkRecord, Orientation, RawSnapshot, TrafficClass};
use crate::{Error, Result};

pub use fit::{
    breakpoint_fit, breakpoint_fit_dated, hurwitz_zeta, powerlaw_fit, BreakpointFit, DatedBreakpointFit, PowerLawFit,
    MIN_TAIL,
};
pub use io::{read_graph, write_edgelist, write_gexf, write_graph, write_weight_csv};
pub use metrics::{
    degree_distribution, degrees, ixp_balance, largest_component_fraction, node_metrics, BalanceReport, BalanceSummary,
    NodeMetrics, Side,
};

/// Imbalance coefficients per traffic class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    /// Balanced and Not Disclosed.
    pub beta_b: f64,
    /// Mostly inbound / outbound.
    pub beta_m: f64,
    /// Heavy inbound / outbound.
    pub beta_h: f64,
}

impl Default for BetaParams {
    fn default() -> Self {
        BetaParams {
            beta_b: 0.0,
            beta_m: 0.75,
            beta_h: 0.95,
        }
    }
}

impl BetaParams {
    pub fn new(beta_b: f64, beta_m: f64, beta_h: f64) -> Result<Self> {
        for (name, v) in [("beta_b", beta_b), ("beta_m", beta_m), ("beta_h", beta_h)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(BetaParams { beta_b, beta_m, beta_h })
    }

    pub fn for_class(&self, class: TrafficClass) -> f64 {
        match class {
            TrafficClass::Balanced | TrafficClass::NotDisclosed => self.beta_b,
            TrafficClass::MostlyInbound | TrafficClass::MostlyOutbound => self.beta_m,
            TrafficClass::HeavyInbound | TrafficClass::HeavyOutbound => self.beta_h,
        }
    }
}

/// Stable identifier of a node. ASes order before IXPs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeId {
    As(u32),
    Ixp(u32),
}

impl NodeId {
    pub fn is_as(self) -> bool {
        matches!(self, NodeId::As(_))
    }

    pub fn kind(self) -> &'static str {
        match self {
            NodeId::As(_) => "as",
            NodeId::Ixp(_) => "ixp",
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::As(n) => write!(f, "AS{n}"),
            NodeId::Ixp(n) => write!(f, "IX{n}"),
        }
    }
}

impl FromStr for NodeId {
    type Err = Error;

    /// Accepts `AS123`, `IX45`, or a bare number (taken as an AS).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::UnknownNode(s.to_string());
        let upper = s.to_ascii_uppercase();
        if let Some(n) = upper.strip_prefix("AS") {
            n.parse().map(NodeId::As).map_err(|_| bad())
        } else if let Some(n) = upper.strip_prefix("IX") {
            n.parse().map(NodeId::Ixp).map_err(|_| bad())
        } else {
            upper.parse().map(NodeId::As).map_err(|_| bad())
        }
    }
}

/// Aggregated membership of one AS at one IXP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Index into [`CGraph::as_nodes`].
    pub as_index: usize,
    /// Index into [`CGraph::ixp_nodes`].
    pub ixp_index: usize,
    /// Summed port size, Mbit/s, strictly positive.
    pub ps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// IXPs with fewer distinct member ASes are removed. `1` keeps all.
    pub min_members: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { min_members: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CGraph {
    pub date: Option<NaiveDate>,
    as_nodes: Vec<NetworkRecord>,
    ixp_nodes: Vec<IxpRecord>,
    /// Sorted by `(as_index, ixp_index)`.
    edges: Vec<Edge>,
    beta: BetaParams,
}

impl CGraph {
    pub fn build(snapshot: &RawSnapshot, beta: BetaParams) -> Result<Self> {
        Self::build_with(snapshot, beta, BuildOptions::default())
    }

    /// Aggregates router ports per `(AS, IXP)` by summation, drops pairs
    /// without capacity, then keeps only nodes that still have an edge.
    pub fn build_with(snapshot: &RawSnapshot, beta: BetaParams, opts: BuildOptions) -> Result<Self> {
        let mut pairs: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for m in &snapshot.memberships {
            *pairs.entry((m.asn, m.ixp_id)).or_insert(0.0) += m.port_size;
        }
        pairs.retain(|_, ps| *ps > 0.0);

        if opts.min_members > 1 {
            let mut members: BTreeMap<u32, usize> = BTreeMap::new();
            for &(_, ix) in pairs.keys() {
                *members.entry(ix).or_default() += 1;
            }
            pairs.retain(|(_, ix), _| members[ix] >= opts.min_members);
        }

        let edges: Vec<(u32, u32, f64)> = pairs.into_iter().map(|((a, x), ps)| (a, x, ps)).collect();
        let mut as_with_edge: Vec<u32> = edges.iter().map(|e| e.0).collect();
        as_with_edge.dedup();
        let mut ixp_with_edge: Vec<u32> = edges.iter().map(|e| e.1).collect();
        ixp_with_edge.sort_unstable();
        ixp_with_edge.dedup();
        let as_nodes = snapshot
            .networks
            .iter()
            .filter(|n| as_with_edge.binary_search(&n.asn).is_ok())
            .cloned();
        let ixp_nodes = snapshot
            .ixps
            .iter()
            .filter(|x| ixp_with_edge.binary_search(&x.ixp_id).is_ok())
            .cloned();
        let mut g = Self::from_parts(as_nodes.collect(), ixp_nodes.collect(), &edges, beta)?;
        g.date = Some(snapshot.date);
        Ok(g)
    }

    /// Assembles a graph from node tables and `(asn, ixp_id, ps)` edges.
    /// Duplicate pairs are summed; every edge endpoint must be listed and
    /// every listed node must have an edge.
    pub fn from_parts(
        mut as_nodes: Vec<NetworkRecord>,
        mut ixp_nodes: Vec<IxpRecord>,
        edges: &[(u32, u32, f64)],
        beta: BetaParams,
    ) -> Result<Self> {
        as_nodes.sort_by_key(|n| n.asn);
        ixp_nodes.sort_by_key(|x| x.ixp_id);
        if as_nodes.windows(2).any(|w| w[0].asn == w[1].asn) || ixp_nodes.windows(2).any(|w| w[0].ixp_id == w[1].ixp_id)
        {
            return Err(Error::MalformedGraph("duplicate node".into()));
        }
        let mut agg: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(asn, ix, ps) in edges {
            if !(ps.is_finite() && ps >= 0.0) {
                return Err(Error::MalformedGraph(format!(
                    "invalid port size {ps} on AS{asn}-IX{ix}"
                )));
            }
            let a = as_nodes
                .binary_search_by_key(&asn, |n| n.asn)
                .map_err(|_| Error::UnknownNode(NodeId::As(asn).to_string()))?;
            let x = ixp_nodes
                .binary_search_by_key(&ix, |n| n.ixp_id)
                .map_err(|_| Error::UnknownNode(NodeId::Ixp(ix).to_string()))?;
            *agg.entry((a, x)).or_insert(0.0) += ps;
        }
        let edges: Vec<Edge> = agg
            .into_iter()
            .filter(|&(_, ps)| ps > 0.0)
            .map(|((as_index, ixp_index), ps)| Edge {
                as_index,
                ixp_index,
                ps,
            })
            .collect();
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut as_seen = vec![false; as_nodes.len()];
        let mut ixp_seen = vec![false; ixp_nodes.len()];
        for e in &edges {
            as_seen[e.as_index] = true;
            ixp_seen[e.ixp_index] = true;
        }
        if let Some(i) = as_seen.iter().position(|s| !s) {
            return Err(Error::MalformedGraph(format!("AS{} has no edge", as_nodes[i].asn)));
        }
        if let Some(i) = ixp_seen.iter().position(|s| !s) {
            return Err(Error::MalformedGraph(format!("IX{} has no edge", ixp_nodes[i].ixp_id)));
        }
        Ok(CGraph {
            date: None,
            as_nodes,
            ixp_nodes,
            edges,
            beta,
        })
    }

    /// Same topology and port sizes, weights re-derived for another beta.
    pub fn with_beta(&self, beta: BetaParams) -> CGraph {
        CGraph { beta, ..self.clone() }
    }

    pub fn beta(&self) -> BetaParams {
        self.beta
    }

    pub fn as_nodes(&self) -> &[NetworkRecord] {
        &self.as_nodes
    }

    pub fn ixp_nodes(&self) -> &[IxpRecord] {
        &self.ixp_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n(&self) -> usize {
        self.as_nodes.len() + self.ixp_nodes.len()
    }

    pub fn n_as(&self) -> usize {
        self.as_nodes.len()
    }

    pub fn n_ixp(&self) -> usize {
        self.ixp_nodes.len()
    }

    pub fn is_as(&self, node: usize) -> bool {
        node < self.as_nodes.len()
    }

    pub fn ixp_node(&self, ixp_index: usize) -> usize {
        self.as_nodes.len() + ixp_index
    }

    pub fn node_id(&self, node: usize) -> NodeId {
        if node < self.as_nodes.len() {
            NodeId::As(self.as_nodes[node].asn)
        } else {
            NodeId::Ixp(self.ixp_nodes[node - self.as_nodes.len()].ixp_id)
        }
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        (0..self.n()).map(|i| self.node_id(i)).collect()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        match id {
            NodeId::As(asn) => self.as_nodes.binary_search_by_key(&asn, |n| n.asn).ok(),
            NodeId::Ixp(ix) => self
                .ixp_nodes
                .binary_search_by_key(&ix, |n| n.ixp_id)
                .ok()
                .map(|i| i + self.as_nodes.len()),
        }
    }

    pub fn node_name(&self, node: usize) -> &str {
        if node < self.as_nodes.len() {
            &self.as_nodes[node].name
        } else {
            &self.ixp_nodes[node - self.as_nodes.len()].name
        }
    }

    pub fn class_of(&self, as_index: usize) -> TrafficClass {
        self.as_nodes[as_index].info_ratio
    }

    /// `(W[as][ixp], W[ixp][as])`: the IXP -> AS and AS -> IXP weights.
    pub fn edge_weights(&self, edge: &Edge) -> (f64, f64) {
        let class = self.class_of(edge.as_index);
        let reduced = (1.0 - self.beta.for_class(class)) * edge.ps;
        match class.orientation() {
            Orientation::Inbound | Orientation::Symmetric => (edge.ps, reduced),
            Orientation::Outbound => (reduced, edge.ps),
        }
    }

    /// Non-zero entries of `W` as `(row, col, weight)`, i.e. link `col -> row`.
    pub fn weight_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            let a = e.as_index;
            let x = self.ixp_node(e.ixp_index);
            let (to_as, to_ixp) = self.edge_weights(e);
            if to_as > 0.0 {
                out.push((a, x, to_as));
            }
            if to_ixp > 0.0 {
                out.push((x, a, to_ixp));
            }
        }
        out
    }

    /// Undirected neighbour lists by node index.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for e in &self.edges {
            let x = self.ixp_node(e.ixp_index);
            adj[e.as_index].push(x);
            adj[x].push(e.as_index);
        }
        adj
    }
}
