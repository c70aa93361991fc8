use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::cgraph::CGraph;
use crate::ingest::GroundTruth;
use crate::{Error, Result};

/// Label given to ASes whose IXPs do not single out one country.
pub const TIED: &str = "Tied";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MajorityRule {
    /// More than half of the AS's (located) IXPs.
    #[default]
    Strict,
    /// Most frequent country, as long as it is unique.
    Plurality,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CountryAssignment {
    /// AS number to ISO code or [`TIED`].
    pub countries: BTreeMap<u32, String>,
}

impl CountryAssignment {
    pub fn get(&self, asn: u32) -> Option<&str> {
        self.countries.get(&asn).map(String::as_str)
    }

    pub fn tied_count(&self) -> usize {
        self.countries.values().filter(|c| *c == TIED).count()
    }

    pub fn members_of<'a>(&'a self, country: &'a str) -> impl Iterator<Item = u32> + 'a {
        self.countries
            .iter()
            .filter(move |(_, c)| *c == country)
            .map(|(&a, _)| a)
    }

    /// `asn,country`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["asn", "country"])?;
        for (asn, c) in &self.countries {
            w.write_record([asn.to_string(), c.clone()])?;
        }
        w.flush().map_err(|e| Error::io("<country stream>", e))
    }
}

pub fn classify_countries(g: &CGraph) -> CountryAssignment {
    classify_countries_with(g, MajorityRule::Strict)
}

/// One vote per IXP membership; IXPs without a country do not vote.
pub fn classify_countries_with(g: &CGraph, rule: MajorityRule) -> CountryAssignment {
    let mut votes: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); g.n_as()];
    for e in g.edges() {
        let cc = g.ixp_nodes()[e.ixp_index].country.as_str();
        if !cc.is_empty() {
            *votes[e.as_index].entry(cc).or_default() += 1;
        }
    }
    let countries = g
        .as_nodes()
        .iter()
        .zip(&votes)
        .map(|(n, v)| (n.asn, winner(v, rule).unwrap_or(TIED).to_string()))
        .collect();
    CountryAssignment { countries }
}

fn winner<'a>(votes: &BTreeMap<&'a str, usize>, rule: MajorityRule) -> Option<&'a str> {
    let total: usize = votes.values().sum();
    let best = *votes.values().max()?;
    let mut leaders = votes.iter().filter(|(_, &c)| c == best);
    let (cc, _) = leaders.next()?;
    match rule {
        MajorityRule::Strict => (2 * best > total).then_some(*cc),
        MajorityRule::Plurality => leaders.next().is_none().then_some(*cc),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryMetrics {
    pub country: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// ASes whose reference country is this one.
    pub support: usize,
    pub predicted: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ClassificationReport {
    pub rows: Vec<CountryMetrics>,
    /// ASes present in both the assignment and the reference.
    pub evaluated: usize,
    /// Requested countries with no reference AS; their metrics are 0.
    pub zero_support: Vec<String>,
}

impl ClassificationReport {
    pub fn get(&self, country: &str) -> Option<&CountryMetrics> {
        self.rows.iter().find(|r| r.country == country)
    }

    /// `country,precision,recall,f1,support`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["country", "precision", "recall", "f1", "support"])?;
        for r in &self.rows {
            w.write_record([
                r.country.clone(),
                r.precision.to_string(),
                r.recall.to_string(),
                r.f1.to_string(),
                r.support.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<metrics stream>", e))
    }
}

/// One-vs-rest precision, recall and F1 per country, over the ASes known to
/// both sides. `Tied` is a negative prediction for every country. An empty
/// `countries` list evaluates every reference country that occurs.
pub fn classification_metrics(
    assign: &CountryAssignment,
    truth: &GroundTruth,
    countries: &[String],
) -> ClassificationReport {
    let pairs: Vec<(&str, &str)> = assign
        .countries
        .iter()
        .filter_map(|(asn, pred)| Some((pred.as_str(), truth.as_country.get(asn)?.as_str())))
        .collect();
    let wanted: Vec<String> = if countries.is_empty() {
        let seen: BTreeSet<&str> = pairs.iter().map(|p| p.1).collect();
        seen.into_iter().map(String::from).collect()
    } else {
        countries.to_vec()
    };
    let mut report = ClassificationReport {
        evaluated: pairs.len(),
        ..Default::default()
    };
    for c in wanted {
        let tp = pairs.iter().filter(|p| p.0 == c && p.1 == c).count();
        let predicted = pairs.iter().filter(|p| p.0 == c).count();
        let support = pairs.iter().filter(|p| p.1 == c).count();
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        if support == 0 {
            report.zero_support.push(c.clone());
        }
        report.rows.push(CountryMetrics {
            country: c,
            precision,
            recall,
            f1,
            support,
            predicted,
        });
    }
    report
}
