use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::cgraph::{node_metrics, BetaParams, CGraph, NodeId};
use crate::ingest::TrafficClass;
use crate::spectral::{graph_pagerank, rank_table, Direction, PageRankOptions, RankTable};
use crate::{Error, Result};

/// Parses `start:end:count` (inclusive, evenly spaced), a comma list, or a
/// single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("bad grid {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [start, end, count] => {
            let (a, b) = (num(start)?, num(end)?);
            let k: usize = count.trim().parse().map_err(|_| bad())?;
            match k {
                0 => return Err(bad()),
                1 => vec![a],
                _ => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
            }
        }
        [list] => list.split(',').map(num).collect::<Result<_>>()?,
        _ => return Err(bad()),
    };
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum RankScope {
    /// Rank among every node, IXPs included.
    #[default]
    AllNodes,
    AsesOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOptions {
    pub grid_h: Vec<f64>,
    pub grid_m: Vec<f64>,
    /// AS numbers to follow; empty means [`default_probes`] with 4 per class.
    pub probes: Vec<u32>,
    pub scope: RankScope,
    pub pagerank: PageRankOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        let linspace = |a: f64, b: f64| (0..20).map(move |i| a + (b - a) * i as f64 / 19.0).collect();
        SweepOptions {
            grid_h: linspace(0.9, 1.0),
            grid_m: linspace(0.6, 0.8),
            probes: Vec::new(),
            scope: RankScope::AllNodes,
            pagerank: PageRankOptions::default(),
        }
    }
}

/// The `per_class` ASes with the largest port capacity in every traffic
/// class, ties by AS number, classes in [`TrafficClass::ALL`] order.
pub fn default_probes(g: &CGraph, per_class: usize) -> Vec<u32> {
    let cap = node_metrics(g).port_capacity;
    let mut out = Vec::new();
    for class in TrafficClass::ALL {
        let mut members: Vec<usize> = (0..g.n_as()).filter(|&a| g.class_of(a) == class).collect();
        members.sort_by(|&a, &b| cap[b].total_cmp(&cap[a]).then(a.cmp(&b)));
        out.extend(members.iter().take(per_class).map(|&a| g.as_nodes()[a].asn));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeStability {
    pub asn: u32,
    pub name: String,
    pub class: TrafficClass,
    /// At the graph's own beta.
    pub pr: f64,
    pub pr_rank: usize,
    pub rpr: f64,
    pub rpr_rank: usize,
    /// Max minus min rank over the grid.
    pub delta_pr: usize,
    pub delta_rpr: usize,
    /// Max minus min value over the grid.
    pub delta_pr_value: f64,
    pub delta_rpr_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    /// `(beta_h, beta_m)` points actually evaluated.
    pub grid: Vec<(f64, f64)>,
    /// Points skipped because `beta_h >= 1` or a value left `[0, 1]`.
    pub skipped: usize,
    pub probes: Vec<ProbeStability>,
}

impl StabilityReport {
    pub fn probe(&self, asn: u32) -> Option<&ProbeStability> {
        self.probes.iter().find(|p| p.asn == asn)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "asn",
            "name",
            "class",
            "pr",
            "pr_rank",
            "rpr",
            "rpr_rank",
            "delta_pr",
            "delta_rpr",
            "delta_pr_value",
            "delta_rpr_value",
        ])?;
        for p in &self.probes {
            w.write_record([
                p.asn.to_string(),
                p.name.clone(),
                p.class.code().to_string(),
                p.pr.to_string(),
                p.pr_rank.to_string(),
                p.rpr.to_string(),
                p.rpr_rank.to_string(),
                p.delta_pr.to_string(),
                p.delta_rpr.to_string(),
                p.delta_pr_value.to_string(),
                p.delta_rpr_value.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<sweep stream>", e))
    }
}

/// `(rank, value)` of each probe under PR and rPR.
type Observation = Vec<[(usize, f64); 2]>;

fn observe(g: &CGraph, probes: &[usize], opts: &SweepOptions) -> Result<Observation> {
    let ids = g.node_ids();
    let table = |dir| -> Result<RankTable> {
        let p = graph_pagerank(g, dir, opts.pagerank)?;
        Ok(match opts.scope {
            RankScope::AllNodes => rank_table(&p, &ids, |_| true),
            RankScope::AsesOnly => rank_table(&p, &ids, NodeId::is_as),
        })
    };
    let tables = [table(Direction::Forward)?, table(Direction::Reverse)?];
    let mut rank_at = [vec![(0, 0.0); g.n()], vec![(0, 0.0); g.n()]];
    for (t, slot) in tables.iter().zip(rank_at.iter_mut()) {
        for r in &t.rows {
            slot[r.node] = (r.rank, r.value);
        }
    }
    Ok(probes.iter().map(|&a| [rank_at[0][a], rank_at[1][a]]).collect())
}

/// Rebuilds the weights for every `(beta_h, beta_m)` grid point (keeping the
/// graph's `beta_b`) and tracks how far the probes' PR and rPR ranks move.
pub fn beta_stability_sweep(g: &CGraph, opts: &SweepOptions) -> Result<StabilityReport> {
    if opts.grid_h.is_empty() || opts.grid_m.is_empty() {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    let asns = if opts.probes.is_empty() {
        default_probes(g, 4)
    } else {
        opts.probes.clone()
    };
    let probes: Vec<usize> = asns
        .iter()
        .map(|&a| {
            g.index_of(NodeId::As(a))
                .ok_or_else(|| Error::UnknownNode(NodeId::As(a).to_string()))
        })
        .collect::<Result<_>>()?;

    let base = g.beta();
    let mut points = Vec::new();
    let mut skipped = 0;
    for &h in &opts.grid_h {
        for &m in &opts.grid_m {
            match BetaParams::new(base.beta_b, m, h) {
                Ok(b) if h < 1.0 => points.push(b),
                _ => skipped += 1,
            }
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter(
            "no usable grid point (beta_h must stay below 1)".into(),
        ));
    }

    let reference = observe(g, &probes, opts)?;
    let runs: Vec<Observation> = points
        .par_iter()
        .map(|&b| observe(&g.with_beta(b), &probes, opts))
        .collect::<Result<_>>()?;

    let probes = probes
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let spread = |d: usize| {
                let ranks = runs.iter().map(|r| r[k][d].0);
                let values = runs.iter().map(|r| r[k][d].1);
                let rank_spread = ranks.clone().max().unwrap() - ranks.min().unwrap();
                let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                (rank_spread, hi - lo)
            };
            let (delta_pr, delta_pr_value) = spread(0);
            let (delta_rpr, delta_rpr_value) = spread(1);
            ProbeStability {
                asn: g.as_nodes()[a].asn,
                name: g.as_nodes()[a].name.clone(),
                class: g.class_of(a),
                pr: reference[k][0].1,
                pr_rank: reference[k][0].0,
                rpr: reference[k][1].1,
                rpr_rank: reference[k][1].0,
                delta_pr,
                delta_rpr,
                delta_pr_value,
                delta_rpr_value,
            }
        })
        .collect();

    Ok(StabilityReport {
        grid: points.iter().map(|b| (b.beta_h, b.beta_m)).collect(),
        skipped,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgraph::tests::{ixp, net};

    fn small() -> CGraph {
        CGraph::from_parts(
            vec![
                net(1, TrafficClass::HeavyOutbound),
                net(2, TrafficClass::MostlyInbound),
                net(3, TrafficClass::Balanced),
                net(4, TrafficClass::HeavyInbound),
            ],
            vec![ixp(1, "DE"), ixp(2, "FR")],
            &[
                (1, 1, 100.0),
                (1, 2, 50.0),
                (2, 1, 40.0),
                (3, 2, 30.0),
                (4, 1, 20.0),
                (4, 2, 20.0),
            ],
            BetaParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.6:0.8:3").unwrap(), vec![0.6, 0.7, 0.8]);
        assert_eq!(parse_grid("0.9").unwrap(), vec![0.9]);
        assert_eq!(parse_grid("0.9,0.95").unwrap(), vec![0.9, 0.95]);
        assert_eq!(parse_grid("1:2:1").unwrap(), vec![1.0]);
        assert!(parse_grid("0.9:1.0:0").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn single_point_has_no_spread() {
        let opts = SweepOptions {
            grid_h: vec![0.93],
            grid_m: vec![0.7],
            ..Default::default()
        };
        let r = beta_stability_sweep(&small(), &opts).unwrap();
        assert_eq!(r.grid.len(), 1);
        for p in &r.probes {
            assert_eq!((p.delta_pr, p.delta_rpr), (0, 0));
            assert_eq!((p.delta_pr_value, p.delta_rpr_value), (0.0, 0.0));
        }
    }

    #[test]
    fn unit_beta_h_is_skipped() {
        let opts = SweepOptions {
            grid_h: parse_grid("0.9:1.0:3").unwrap(),
            grid_m: vec![0.75],
            ..Default::default()
        };
        let r = beta_stability_sweep(&small(), &opts).unwrap();
        assert_eq!((r.grid.len(), r.skipped), (2, 1));
    }

    #[test]
    fn probes_default_to_top_capacity_per_class() {
        let g = small();
        assert_eq!(default_probes(&g, 4), vec![3, 4, 1, 2]);
        assert_eq!(default_probes(&g, 0), Vec::<u32>::new());
    }

    #[test]
    fn unknown_probe() {
        let opts = SweepOptions {
            probes: vec![99],
            ..Default::default()
        };
        assert!(matches!(
            beta_stability_sweep(&small(), &opts),
            Err(Error::UnknownNode(_))
        ));
    }
}
