use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::Partition;
use crate::cgraph::{node_metrics, CGraph};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    pub community: usize,
    /// IXP countries by descending count, then code. IXPs without a country
    /// are not listed.
    pub countries: Vec<(String, usize)>,
    pub distinct_countries: usize,
    pub n_as: usize,
    pub n_ixp: usize,
    /// Percent of the total IXP port capacity held by member IXPs.
    pub capacity_share: f64,
    /// Percent of all IXPs.
    pub ixp_share: f64,
}

impl ClusterProfile {
    /// `US: 74 | CA: 12` for the `top` most frequent countries.
    pub fn country_summary(&self, top: usize) -> String {
        self.countries
            .iter()
            .take(top)
            .map(|(c, k)| format!("{c}: {k}"))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// Per community statistics over its IXPs, largest capacity share first
/// (ties by community id).
pub fn cluster_profile(p: &Partition, g: &CGraph) -> Result<Vec<ClusterProfile>> {
    if p.assignment.len() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "partition covers {} nodes, graph has {}",
            p.assignment.len(),
            g.n()
        )));
    }
    let cap = node_metrics(g).port_capacity;
    let total_cap: f64 = cap[g.n_as()..].iter().sum();
    let mut profiles: Vec<ClusterProfile> = Vec::new();
    for c in 0..p.n_communities() {
        let members = p.members(c);
        let mut hist: BTreeMap<&str, usize> = BTreeMap::new();
        let mut capacity = 0.0;
        let mut n_ixp = 0;
        for &i in &members {
            if g.is_as(i) {
                continue;
            }
            n_ixp += 1;
            capacity += cap[i];
            let cc = g.ixp_nodes()[i - g.n_as()].country.as_str();
            if !cc.is_empty() {
                *hist.entry(cc).or_default() += 1;
            }
        }
        let mut countries: Vec<(String, usize)> = hist.into_iter().map(|(c, k)| (c.to_string(), k)).collect();
        countries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        profiles.push(ClusterProfile {
            community: c,
            distinct_countries: countries.len(),
            countries,
            n_as: members.len() - n_ixp,
            n_ixp,
            capacity_share: 100.0 * capacity / total_cap,
            ixp_share: 100.0 * n_ixp as f64 / g.n_ixp() as f64,
        });
    }
    profiles.sort_by(|a, b| {
        b.capacity_share
            .total_cmp(&a.capacity_share)
            .then(a.community.cmp(&b.community))
    });
    Ok(profiles)
}

/// `community,countries,distinct_countries,capacity_share,ixp_share,n_ixp,n_as`.
pub fn write_profile_csv(profiles: &[ClusterProfile], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "community",
        "countries",
        "distinct_countries",
        "capacity_share",
        "ixp_share",
        "n_ixp",
        "n_as",
    ])?;
    for p in profiles {
        w.write_record([
            p.community.to_string(),
            p.country_summary(usize::MAX),
            p.distinct_countries.to_string(),
            p.capacity_share.to_string(),
            p.ixp_share.to_string(),
            p.n_ixp.to_string(),
            p.n_as.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<profile stream>", e))
}
