use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use super::CountryAssignment;
use crate::cgraph::{node_metrics, CGraph, NodeId};
use crate::ingest::{GroundTruth, TrafficClass, NOT_DISCLOSED};
use crate::spectral::{graph_pagerank, rank_table, Direction, PageRankOptions, PageRankVector, RankTable};
use crate::{Error, Result};

/// Top `k` ASes by reverse PageRank.
pub fn hypergiants(g: &CGraph, k: usize, opts: PageRankOptions) -> Result<RankTable> {
    if k == 0 || k > g.n_as() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} with {} ASes in the graph",
            g.n_as()
        )));
    }
    let p = graph_pagerank(g, Direction::Reverse, opts)?;
    Ok(rank_table(&p, &g.node_ids(), NodeId::is_as).top(k))
}

pub const DEFAULT_BUSINESS_TYPES: [&str; 2] = ["Cable/DSL/ISP", NOT_DISCLOSED];

/// Maps short names (`ISP`, `ND`, `NSP`, `Content`, ...) to PeeringDB
/// business types; anything else is taken verbatim.
pub fn parse_business_types(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            match s.to_ascii_uppercase().as_str() {
                "ISP" => "Cable/DSL/ISP",
                "ND" => NOT_DISCLOSED,
                "NSP" => "NSP",
                "CONTENT" => "Content",
                "EDU" => "Educational/Research",
                "ENT" => "Enterprise",
                "NONPROFIT" => "Non-Profit",
                _ => s,
            }
            .to_string()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverOptions {
    pub countries: Vec<String>,
    pub business_types: Vec<String>,
    pub hypergiants: BTreeSet<u32>,
    pub exclude: BTreeSet<u32>,
    pub top: usize,
}

impl Default for ReceiverOptions {
    fn default() -> Self {
        ReceiverOptions {
            countries: Vec::new(),
            business_types: DEFAULT_BUSINESS_TYPES.iter().map(|s| s.to_string()).collect(),
            hypergiants: BTreeSet::new(),
            exclude: BTreeSet::new(),
            top: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryReceivers {
    pub country: String,
    /// Ranks are within the country, from 1.
    pub table: RankTable,
}

/// Per country, the assigned ASes of the wanted business types ranked by
/// forward PageRank `pr`, hypergiants and exclusions removed.
pub fn traffic_receivers(
    g: &CGraph,
    pr: &PageRankVector,
    assign: &CountryAssignment,
    opts: &ReceiverOptions,
) -> Vec<CountryReceivers> {
    let ids = g.node_ids();
    opts.countries
        .iter()
        .map(|country| {
            let keep = |id: NodeId| match id {
                NodeId::As(asn) => {
                    let a = g.index_of(id).expect("id from graph");
                    assign.get(asn) == Some(country.as_str())
                        && opts.business_types.iter().any(|t| *t == g.as_nodes()[a].info_type)
                        && !opts.hypergiants.contains(&asn)
                        && !opts.exclude.contains(&asn)
                }
                NodeId::Ixp(_) => false,
            };
            CountryReceivers {
                country: country.clone(),
                table: rank_table(pr, &ids, keep).top(opts.top),
            }
        })
        .collect()
}

pub fn write_receivers_csv(receivers: &[CountryReceivers], g: &CGraph, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["country", "rank", "asn", "name", "value"])?;
    for c in receivers {
        for r in &c.table.rows {
            w.write_record([
                c.country.clone(),
                r.rank.to_string(),
                r.id.to_string(),
                g.node_name(r.node).to_string(),
                r.value.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<receivers stream>", e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EumsCoverage {
    pub country: String,
    /// Summed end-user market share, percent.
    pub eums: f64,
    /// Per listed AS, its share if the reference knows it.
    pub members: Vec<(u32, Option<f64>)>,
}

pub fn eums_coverage(receivers: &[CountryReceivers], truth: &GroundTruth) -> Vec<EumsCoverage> {
    receivers
        .iter()
        .map(|c| {
            let members: Vec<(u32, Option<f64>)> = c
                .table
                .rows
                .iter()
                .filter_map(|r| match r.id {
                    NodeId::As(asn) => Some((asn, truth.eums_of(asn, &c.country).map(|e| e.percent))),
                    NodeId::Ixp(_) => None,
                })
                .collect();
            EumsCoverage {
                country: c.country.clone(),
                eums: members.iter().filter_map(|m| m.1).fold(0.0, |a, b| a + b),
                members,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassShare {
    pub class: TrafficClass,
    pub count: usize,
    /// Percent of ASes.
    pub count_share: f64,
    /// Mbit/s.
    pub capacity: f64,
    /// Percent of total AS port capacity.
    pub capacity_share: f64,
}

/// AS count and port capacity per declared traffic ratio, all six classes.
pub fn info_ratio_summary(g: &CGraph) -> Vec<ClassShare> {
    let cap = node_metrics(g).port_capacity;
    let total_cap: f64 = cap[..g.n_as()].iter().sum();
    let n = g.n_as() as f64;
    TrafficClass::ALL
        .iter()
        .map(|&class| {
            let members: Vec<usize> = (0..g.n_as()).filter(|&a| g.class_of(a) == class).collect();
            let capacity = members.iter().fold(0.0, |s, &a| s + cap[a]);
            ClassShare {
                class,
                count: members.len(),
                count_share: 100.0 * members.len() as f64 / n,
                capacity,
                capacity_share: 100.0 * capacity / total_cap,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::classify_countries;
    use crate::cgraph::BetaParams;
    use crate::ingest::{IxpRecord, NetworkRecord};
    use crate::spectral::graph_pagerank;

    fn net(asn: u32, class: TrafficClass, info_type: &str) -> NetworkRecord {
        NetworkRecord {
            asn,
            name: format!("net{asn}"),
            info_ratio: class,
            info_scope: String::new(),
            info_type: info_type.into(),
        }
    }

    fn ixp(id: u32, cc: &str) -> IxpRecord {
        IxpRecord {
            ixp_id: id,
            name: String::new(),
            country: cc.into(),
        }
    }

    #[test]
    fn share_arithmetic() {
        let g = CGraph::from_parts(
            vec![
                net(1, TrafficClass::HeavyOutbound, "Content"),
                net(2, TrafficClass::Balanced, "NSP"),
            ],
            vec![ixp(1, "DE")],
            &[(1, 1, 90.0), (2, 1, 10.0)],
            BetaParams::default(),
        )
        .unwrap();
        let s = info_ratio_summary(&g);
        let ho = s.iter().find(|c| c.class == TrafficClass::HeavyOutbound).unwrap();
        let b = s.iter().find(|c| c.class == TrafficClass::Balanced).unwrap();
        assert_eq!((ho.capacity_share, ho.count_share), (90.0, 50.0));
        assert_eq!((b.capacity_share, b.count_share), (10.0, 50.0));
        assert_eq!(s.iter().map(|c| c.capacity_share).sum::<f64>(), 100.0);
    }

    #[test]
    fn business_type_aliases() {
        assert_eq!(
            parse_business_types("ISP, ND,NSP"),
            vec!["Cable/DSL/ISP", "Not Disclosed", "NSP"]
        );
        assert_eq!(parse_business_types("Enterprise"), vec!["Enterprise"]);
    }

    #[test]
    fn receivers_filter() {
        let g = CGraph::from_parts(
            vec![
                net(1, TrafficClass::HeavyInbound, "Cable/DSL/ISP"),
                net(2, TrafficClass::HeavyInbound, "Cable/DSL/ISP"),
                net(3, TrafficClass::HeavyInbound, "Content"),
                net(4, TrafficClass::MostlyInbound, "Not Disclosed"),
                net(5, TrafficClass::HeavyOutbound, "Content"),
            ],
            vec![ixp(1, "DE"), ixp(2, "FR")],
            &[
                (1, 1, 500.0),
                (2, 1, 100.0),
                (3, 1, 300.0),
                (4, 1, 50.0),
                (5, 1, 1000.0),
                (5, 2, 10.0),
            ],
            BetaParams::default(),
        )
        .unwrap();
        let assign = classify_countries(&g);
        let pr = graph_pagerank(&g, Direction::Forward, PageRankOptions::default()).unwrap();
        let opts = ReceiverOptions {
            countries: vec!["DE".into(), "FR".into()],
            exclude: [2].into(),
            ..Default::default()
        };
        let r = traffic_receivers(&g, &pr, &assign, &opts);
        assert_eq!(r[0].table.ids(), vec![NodeId::As(1), NodeId::As(4)]);
        assert!(r[1].table.is_empty());

        let mut truth = GroundTruth::default();
        truth.read_apnic("1,DE,10.0,1\n4,FR,5.0,2\n");
        let cov = eums_coverage(&r, &truth);
        assert_eq!(cov[0].eums, 10.0);
        assert_eq!(cov[0].members, vec![(1, Some(10.0)), (4, None)]);
    }

    #[test]
    fn hypergiant_bounds() {
        let g = CGraph::from_parts(
            vec![net(7, TrafficClass::HeavyOutbound, "Content")],
            vec![ixp(1, "DE")],
            &[(7, 1, 10.0)],
            BetaParams::default(),
        )
        .unwrap();
        let t = hypergiants(&g, 1, PageRankOptions::default()).unwrap();
        assert_eq!(t.ids(), vec![NodeId::As(7)]);
        assert!(hypergiants(&g, 2, PageRankOptions::default()).is_err());
    }
}
