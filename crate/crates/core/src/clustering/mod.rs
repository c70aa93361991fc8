//! Communities of the undirected graph `A = W + W^T`.
//!
//! The objective is Barber's bipartite modularity: with `k_i` the weighted
//! degree of AS `i`, `d_j` that of IXP `j` and `m` the total edge weight,
//!
//! ```text
//! Q = 1/m * sum over AS i, IXP j of [A_ij - k_i d_j / m] * delta(c_i, c_j)
//! ```
//!
//! The null model only pairs nodes of opposite sides, so same-side pairs
//! never contribute.

mod louvain;
mod profile;

pub use louvain::{louvain_bipartite, modularity, LouvainOptions, Partition};
pub use profile::{cluster_profile, write_profile_csv, ClusterProfile};

use serde::Serialize;

use crate::cgraph::CGraph;
use crate::{Error, Result};

/// Undirected weighted bipartite graph. Side `true` is the AS side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteGraph {
    red: Vec<bool>,
    /// Neighbours sorted by index, duplicates summed.
    adj: Vec<Vec<(usize, f64)>>,
    total: f64,
}

impl BipartiteGraph {
    /// `red[i]` gives the side of node `i`; edges must cross sides.
    pub fn new(red: Vec<bool>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let n = red.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({u}, {v}) outside {n} nodes")));
            }
            if red[u] == red[v] {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) joins nodes of one side"
                )));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidParameter(format!("weight {w} on ({u}, {v})")));
            }
            if w > 0.0 {
                adj[u].push((v, w));
                adj[v].push((u, w));
            }
        }
        let mut total = 0.0;
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_by_key(|e| e.0);
            list.dedup_by(|next, kept| {
                if next.0 == kept.0 {
                    kept.1 += next.1;
                    true
                } else {
                    false
                }
            });
            if red[u] {
                total += list.iter().map(|e| e.1).sum::<f64>();
            }
        }
        Ok(BipartiteGraph { red, adj, total })
    }

    pub fn n(&self) -> usize {
        self.red.len()
    }

    pub fn is_red(&self, node: usize) -> bool {
        self.red[node]
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adj[node]
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        match self.adj[u].binary_search_by_key(&v, |e| e.0) {
            Ok(k) => self.adj[u][k].1,
            Err(_) => 0.0,
        }
    }

    pub fn degree(&self, node: usize) -> f64 {
        self.adj[node].iter().map(|e| e.1).sum()
    }

    /// Sum of edge weights, each edge once.
    pub fn total_weight(&self) -> f64 {
        self.total
    }
}

/// `A = W + W^T` over the graph's node order; an edge of class `beta`
/// weighs `(2 - beta) ps`.
pub fn symmetrize(g: &CGraph) -> BipartiteGraph {
    let red = (0..g.n()).map(|i| g.is_as(i)).collect();
    let edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = g.edge_weights(e);
            (e.as_index, g.ixp_node(e.ixp_index), a + b)
        })
        .collect();
    BipartiteGraph::new(red, &edges).expect("graph edges are bipartite")
}
