use std::collections::BTreeMap;

use serde::Serialize;

use super::{CGraph, NodeId};

/// Per-node weighted degrees and capacities, indexed like the graph nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeMetrics {
    /// `sum_j W[i][j]`.
    pub w_in: Vec<f64>,
    /// `sum_j W[j][i]`.
    pub w_out: Vec<f64>,
    /// Number of distinct neighbours.
    pub degree: Vec<usize>,
    /// Sum of aggregated port sizes over incident edges.
    pub port_capacity: Vec<f64>,
}

pub fn node_metrics(g: &CGraph) -> NodeMetrics {
    let n = g.n();
    let mut m = NodeMetrics {
        w_in: vec![0.0; n],
        w_out: vec![0.0; n],
        degree: vec![0; n],
        port_capacity: vec![0.0; n],
    };
    for e in g.edges() {
        let a = e.as_index;
        let x = g.ixp_node(e.ixp_index);
        let (to_as, to_ixp) = g.edge_weights(e);
        m.w_in[a] += to_as;
        m.w_out[x] += to_as;
        m.w_in[x] += to_ixp;
        m.w_out[a] += to_ixp;
        m.degree[a] += 1;
        m.degree[x] += 1;
        m.port_capacity[a] += e.ps;
        m.port_capacity[x] += e.ps;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceSummary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Quartiles with linear interpolation between order statistics.
    pub quartiles: (f64, f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    /// `B(i)` per IXP in node order; `None` when the IXP carries no weight.
    pub values: Vec<(NodeId, Option<f64>)>,
    pub undefined: usize,
    /// `None` when no IXP has a defined balance.
    pub summary: Option<BalanceSummary>,
}

/// Normalized traffic balance `B = (w_out - w_in) / (w_out + w_in)` per IXP.
pub fn ixp_balance(g: &CGraph) -> BalanceReport {
    let m = node_metrics(g);
    let values: Vec<(NodeId, Option<f64>)> = (g.n_as()..g.n())
        .map(|i| {
            let total = m.w_out[i] + m.w_in[i];
            let b = (total > 0.0).then(|| (m.w_out[i] - m.w_in[i]) / total);
            (g.node_id(i), b)
        })
        .collect();
    let mut defined: Vec<f64> = values.iter().filter_map(|v| v.1).collect();
    let undefined = values.len() - defined.len();
    let summary = (!defined.is_empty()).then(|| {
        defined.sort_by(f64::total_cmp);
        let n = defined.len() as f64;
        let mean = defined.iter().sum::<f64>() / n;
        let var = defined.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / n;
        BalanceSummary {
            mean,
            std: var.sqrt(),
            quartiles: (
                quantile(&defined, 0.25),
                quantile(&defined, 0.5),
                quantile(&defined, 0.75),
            ),
        }
    });
    BalanceReport {
        values,
        undefined,
        summary,
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    As,
    Ixp,
}

pub fn degrees(g: &CGraph, side: Side) -> Vec<usize> {
    let d = node_metrics(g).degree;
    match side {
        Side::As => d[..g.n_as()].to_vec(),
        Side::Ixp => d[g.n_as()..].to_vec(),
    }
}

/// Empirical probability of each undirected degree on one side.
pub fn degree_distribution(g: &CGraph, side: Side) -> BTreeMap<usize, f64> {
    let d = degrees(g, side);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for k in &d {
        *counts.entry(*k).or_default() += 1;
    }
    let n = d.len() as f64;
    counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect()
}

/// Fraction of nodes in the largest undirected connected component.
pub fn largest_component_fraction(g: &CGraph) -> f64 {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for e in g.edges() {
        let a = find(&mut parent, e.as_index);
        let b = find(&mut parent, g.ixp_node(e.ixp_index));
        if a != b {
            parent[a] = b;
        }
    }
    let mut sizes = vec![0usize; g.n()];
    for i in 0..g.n() {
        let r = find(&mut parent, i);
        sizes[r] += 1;
    }
    *sizes.iter().max().unwrap_or(&0) as f64 / g.n() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgraph::tests::{ixp, net};
    use crate::cgraph::BetaParams;
    use crate::ingest::TrafficClass;

    #[test]
    fn mostly_inbound_identity() {
        let g = CGraph::from_parts(
            vec![net(1, TrafficClass::MostlyInbound)],
            vec![ixp(1, "DE"), ixp(2, "DE")],
            &[(1, 1, 40.0), (1, 2, 60.0)],
            BetaParams::default(),
        )
        .unwrap();
        let m = node_metrics(&g);
        assert_eq!(m.port_capacity[0], 100.0);
        assert_eq!(m.w_in[0], 100.0);
        assert_eq!(m.w_out[0], 25.0);
        assert_eq!(m.degree[0], 2);
    }

    #[test]
    fn degree_counts_memberships() {
        let g = CGraph::from_parts(
            vec![
                net(1, TrafficClass::Balanced),
                net(2, TrafficClass::Balanced),
                net(3, TrafficClass::Balanced),
            ],
            vec![ixp(1, "DE"), ixp(2, "DE"), ixp(3, "DE")],
            &[(1, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 1, 1.0), (3, 2, 1.0)],
            BetaParams::default(),
        )
        .unwrap();
        assert_eq!(degrees(&g, Side::As), vec![3, 1, 1]);
        let dist = degree_distribution(&g, Side::As);
        assert!((dist[&1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((dist[&3] - 1.0 / 3.0).abs() < 1e-15);
        assert!(node_metrics(&g).degree.iter().all(|&d| d >= 1));
    }

    #[test]
    fn star_ixp_degree() {
        let k = 7;
        let nets = (1..=k).map(|a| net(a, TrafficClass::Balanced)).collect();
        let edges: Vec<_> = (1..=k).map(|a| (a, 1, 1.0)).collect();
        let g = CGraph::from_parts(nets, vec![ixp(1, "BR")], &edges, BetaParams::default()).unwrap();
        assert_eq!(degrees(&g, Side::Ixp), vec![k as usize]);
    }

    #[test]
    fn balance_values() {
        let g = CGraph::from_parts(
            vec![net(1, TrafficClass::HeavyOutbound), net(2, TrafficClass::Balanced)],
            vec![ixp(1, "DE"), ixp(2, "DE")],
            &[(1, 1, 100.0), (2, 2, 10.0)],
            BetaParams::default(),
        )
        .unwrap();
        let r = ixp_balance(&g);
        let b1 = r.values[0].1.unwrap();
        assert!((b1 - (5.0 - 100.0) / 105.0).abs() < 1e-12);
        assert!((b1 + 0.9047619047619048).abs() < 1e-12);
        assert_eq!(r.values[1].1, Some(0.0));
        assert_eq!(r.undefined, 0);
    }

    #[test]
    fn full_beta_balance_is_extreme() {
        let beta = BetaParams::new(1.0, 0.75, 0.95).unwrap();
        let g = CGraph::from_parts(
            vec![net(1, TrafficClass::Balanced)],
            vec![ixp(1, "DE")],
            &[(1, 1, 10.0)],
            beta,
        )
        .unwrap();
        // beta_b = 1 leaves a single direction, so the balance is still defined.
        assert_eq!(ixp_balance(&g).values[0].1, Some(1.0));
    }

    #[test]
    fn quartiles_interpolate() {
        let v = [-1.0, 0.0, 0.5, 1.0];
        assert_eq!(quantile(&v, 0.5), 0.25);
        assert_eq!(quantile(&v, 0.25), -0.25);
        assert_eq!(quantile(&v, 0.75), 0.625);
    }

    #[test]
    fn components() {
        let connected = CGraph::from_parts(
            vec![net(1, TrafficClass::Balanced), net(2, TrafficClass::Balanced)],
            vec![ixp(1, "DE")],
            &[(1, 1, 1.0), (2, 1, 1.0)],
            BetaParams::default(),
        )
        .unwrap();
        assert_eq!(largest_component_fraction(&connected), 1.0);
        let halves = CGraph::from_parts(
            vec![net(1, TrafficClass::Balanced), net(2, TrafficClass::Balanced)],
            vec![ixp(1, "DE"), ixp(2, "FR")],
            &[(1, 1, 1.0), (2, 2, 1.0)],
            BetaParams::default(),
        )
        .unwrap();
        assert_eq!(largest_component_fraction(&halves), 0.5);
    }
}
