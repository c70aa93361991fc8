//! PeeringDB dumps and ground-truth tables.
//!
//! A dump is one JSON object per date holding three record families:
//! `net` (networks keyed by AS number), `ix` (exchanges keyed by id) and
//! `netixlan` (one row per router port of a network at an exchange). Each
//! family is either a bare array or an object with a `data` array, which is
//! the layout of the public daily dumps.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

/// Declared traffic imbalance of a network (`info_ratio`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrafficClass {
    Balanced,
    HeavyInbound,
    HeavyOutbound,
    MostlyInbound,
    MostlyOutbound,
    NotDisclosed,
}

/// Which side of an AS-IXP link carries the full port size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Full weight on IXP -> AS.
    Inbound,
    /// Full weight on AS -> IXP.
    Outbound,
    /// Weighted by `beta_b` in one direction; symmetric when `beta_b == 0`.
    Symmetric,
}

impl TrafficClass {
    pub const ALL: [TrafficClass; 6] = [
        TrafficClass::Balanced,
        TrafficClass::HeavyInbound,
        TrafficClass::HeavyOutbound,
        TrafficClass::MostlyInbound,
        TrafficClass::MostlyOutbound,
        TrafficClass::NotDisclosed,
    ];

    /// Parses the free-text PeeringDB label. Anything unrecognised, including
    /// the empty string, is `NotDisclosed`.
    pub fn from_label(label: &str) -> Self {
        let norm: String = label
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "balanced" | "b" => TrafficClass::Balanced,
            "heavyinbound" | "hi" => TrafficClass::HeavyInbound,
            "heavyoutbound" | "ho" => TrafficClass::HeavyOutbound,
            "mostlyinbound" | "mi" => TrafficClass::MostlyInbound,
            "mostlyoutbound" | "mo" => TrafficClass::MostlyOutbound,
            _ => TrafficClass::NotDisclosed,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TrafficClass::Balanced => "Balanced",
            TrafficClass::HeavyInbound => "Heavy Inbound",
            TrafficClass::HeavyOutbound => "Heavy Outbound",
            TrafficClass::MostlyInbound => "Mostly Inbound",
            TrafficClass::MostlyOutbound => "Mostly Outbound",
            TrafficClass::NotDisclosed => "Not Disclosed",
        }
    }

    /// Short code used in edge lists and tables.
    pub fn code(self) -> &'static str {
        match self {
            TrafficClass::Balanced => "B",
            TrafficClass::HeavyInbound => "HI",
            TrafficClass::HeavyOutbound => "HO",
            TrafficClass::MostlyInbound => "MI",
            TrafficClass::MostlyOutbound => "MO",
            TrafficClass::NotDisclosed => "ND",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        TrafficClass::ALL.into_iter().find(|c| c.code() == code)
    }

    pub fn orientation(self) -> Orientation {
        match self {
            TrafficClass::HeavyInbound | TrafficClass::MostlyInbound => Orientation::Inbound,
            TrafficClass::HeavyOutbound | TrafficClass::MostlyOutbound => Orientation::Outbound,
            TrafficClass::Balanced | TrafficClass::NotDisclosed => Orientation::Symmetric,
        }
    }
}

impl fmt::Display for TrafficClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

pub const NOT_DISCLOSED: &str = "Not Disclosed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRecord {
    pub asn: u32,
    pub name: String,
    pub info_ratio: TrafficClass,
    pub info_scope: String,
    pub info_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IxpRecord {
    pub ixp_id: u32,
    pub name: String,
    /// ISO 3166 alpha-2, or empty when unknown.
    pub country: String,
}

/// One router port. Several records may share `(asn, ixp_id)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipRecord {
    pub asn: u32,
    pub ixp_id: u32,
    /// Mbit/s. Missing speed is stored as zero.
    pub port_size: f64,
}

/// Records that were skipped while parsing a dump.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub malformed_networks: usize,
    pub malformed_ixps: usize,
    pub malformed_memberships: usize,
    pub duplicate_networks: usize,
    pub duplicate_ixps: usize,
    /// Memberships whose AS or IXP is not in the dump.
    pub unresolved_memberships: usize,
}

impl IngestReport {
    pub fn dropped(&self) -> usize {
        self.malformed_networks
            + self.malformed_ixps
            + self.malformed_memberships
            + self.duplicate_networks
            + self.duplicate_ixps
            + self.unresolved_memberships
    }
}

/// One parsed dump. Networks are sorted by AS number, IXPs by id; every
/// membership refers to a network and an IXP of the same snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSnapshot {
    pub date: NaiveDate,
    pub networks: Vec<NetworkRecord>,
    pub ixps: Vec<IxpRecord>,
    pub memberships: Vec<MembershipRecord>,
    pub report: IngestReport,
}

impl RawSnapshot {
    pub fn network(&self, asn: u32) -> Option<&NetworkRecord> {
        self.networks
            .binary_search_by_key(&asn, |n| n.asn)
            .ok()
            .map(|i| &self.networks[i])
    }

    pub fn ixp(&self, ixp_id: u32) -> Option<&IxpRecord> {
        self.ixps
            .binary_search_by_key(&ixp_id, |x| x.ixp_id)
            .ok()
            .map(|i| &self.ixps[i])
    }

    /// Total port size per AS, in Mbit/s.
    pub fn capacity_by_as(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for m in &self.memberships {
            *out.entry(m.asn).or_insert(0.0) += m.port_size;
        }
        out
    }

    pub fn total_capacity(&self) -> f64 {
        self.memberships.iter().fold(0.0, |s, m| s + m.port_size)
    }
}

pub fn parse_snapshot(path: impl AsRef<Path>, date: NaiveDate) -> Result<RawSnapshot> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot_bytes(&bytes, date).map_err(|e| match e {
        Error::MalformedDump { reason, .. } => Error::MalformedDump {
            path: path.to_path_buf(),
            reason,
        },
        other => other,
    })
}

/// Parses several dumps in parallel. Results keep the input order.
pub fn parse_snapshots(inputs: &[(PathBuf, NaiveDate)]) -> Vec<Result<RawSnapshot>> {
    inputs
        .par_iter()
        .map(|(path, date)| parse_snapshot(path, *date))
        .collect()
}

pub fn parse_snapshot_bytes(bytes: &[u8], date: NaiveDate) -> Result<RawSnapshot> {
    let malformed = |reason: String| Error::MalformedDump {
        path: PathBuf::from("<memory>"),
        reason,
    };
    let root: Value = serde_json::from_slice(bytes).map_err(|e| malformed(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| malformed("top level is not an object".into()))?;
    let family = |key: &str| -> Result<&Vec<Value>> {
        let v = obj
            .get(key)
            .ok_or_else(|| malformed(format!("missing \"{key}\" records")))?;
        let v = match v {
            Value::Object(o) => o
                .get("data")
                .ok_or_else(|| malformed(format!("\"{key}\" has no \"data\" array")))?,
            other => other,
        };
        v.as_array()
            .ok_or_else(|| malformed(format!("\"{key}\" is not an array")))
    };
    let nets = family("net")?;
    let ixs = family("ix")?;
    let links = family("netixlan")?;

    let mut report = IngestReport::default();

    let mut networks: BTreeMap<u32, NetworkRecord> = BTreeMap::new();
    for rec in nets {
        let Some(asn) = rec.get("asn").and_then(as_id) else {
            report.malformed_networks += 1;
            continue;
        };
        if networks.contains_key(&asn) {
            report.duplicate_networks += 1;
            continue;
        }
        let info_type = text(rec, "info_type");
        networks.insert(
            asn,
            NetworkRecord {
                asn,
                name: text(rec, "name"),
                info_ratio: TrafficClass::from_label(&text(rec, "info_ratio")),
                info_scope: or_not_disclosed(text(rec, "info_scope")),
                info_type: or_not_disclosed(info_type),
            },
        );
    }

    let mut ixps: BTreeMap<u32, IxpRecord> = BTreeMap::new();
    for rec in ixs {
        let Some(id) = rec.get("id").and_then(as_id) else {
            report.malformed_ixps += 1;
            continue;
        };
        if ixps.contains_key(&id) {
            report.duplicate_ixps += 1;
            continue;
        }
        ixps.insert(
            id,
            IxpRecord {
                ixp_id: id,
                name: text(rec, "name"),
                country: text(rec, "country").to_ascii_uppercase(),
            },
        );
    }

    let mut memberships = Vec::with_capacity(links.len());
    for rec in links {
        let asn = rec.get("asn").and_then(as_id);
        let ix = rec.get("ix_id").and_then(as_id);
        let speed = match rec.get("speed") {
            None | Some(Value::Null) => Some(0.0),
            Some(v) => v.as_f64().filter(|s| s.is_finite() && *s >= 0.0),
        };
        let (Some(asn), Some(ixp_id), Some(port_size)) = (asn, ix, speed) else {
            report.malformed_memberships += 1;
            continue;
        };
        if !networks.contains_key(&asn) || !ixps.contains_key(&ixp_id) {
            report.unresolved_memberships += 1;
            continue;
        }
        memberships.push(MembershipRecord { asn, ixp_id, port_size });
    }

    Ok(RawSnapshot {
        date,
        networks: networks.into_values().collect(),
        ixps: ixps.into_values().collect(),
        memberships,
        report,
    })
}

fn as_id(v: &Value) -> Option<u32> {
    let n = match v {
        Value::Number(n) => n.as_u64()?,
        Value::String(s) => s.trim().parse().ok()?,
        _ => return None,
    };
    u32::try_from(n).ok().filter(|&n| n > 0)
}

fn text(rec: &Value, key: &str) -> String {
    match rec.get(key) {
        Some(Value::String(s)) => s.split_whitespace().collect::<Vec<_>>().join(" "),
        _ => String::new(),
    }
}

fn or_not_disclosed(s: String) -> String {
    if s.is_empty() {
        NOT_DISCLOSED.to_string()
    } else {
        s
    }
}

/// Extracts a `YYYY-MM-DD` or `YYYY_MM_DD` date from a file name.
pub fn date_from_filename(path: &Path) -> Option<NaiveDate> {
    let name = path.file_name()?.to_str()?;
    let re = Regex::new(r"(\d{4})[-_](\d{2})[-_](\d{2})").ok()?;
    let caps = re.captures(name)?;
    NaiveDate::from_ymd_opt(caps[1].parse().ok()?, caps[2].parse().ok()?, caps[3].parse().ok()?)
}

/// An AS whose total port capacity is implausibly large.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReport {
    pub asn: u32,
    pub name: String,
    pub capacity: f64,
    /// `capacity / reference_capacity`.
    pub ratio: f64,
    /// `(ixp_id, port_size)` per router port.
    pub memberships: Vec<(u32, f64)>,
}

pub const DEFAULT_OUTLIER_FACTOR: f64 = 10.0;

/// Flags ASes whose capacity is strictly greater than `factor` times the
/// reference capacity.
pub fn validate_snapshot(snapshot: &RawSnapshot, reference_capacity: f64, factor: f64) -> Result<Vec<OutlierReport>> {
    if !(reference_capacity > 0.0) || !reference_capacity.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "reference capacity must be positive, got {reference_capacity}"
        )));
    }
    if !(factor > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "outlier factor must be positive, got {factor}"
        )));
    }
    let threshold = factor * reference_capacity;
    let outliers = snapshot
        .capacity_by_as()
        .into_iter()
        .filter(|&(_, cap)| cap > threshold)
        .map(|(asn, capacity)| OutlierReport {
            asn,
            name: snapshot.network(asn).map(|n| n.name.clone()).unwrap_or_default(),
            capacity,
            ratio: capacity / reference_capacity,
            memberships: snapshot
                .memberships
                .iter()
                .filter(|m| m.asn == asn)
                .map(|m| (m.ixp_id, m.port_size))
                .collect(),
        })
        .collect();
    Ok(outliers)
}

/// Total port capacity (Mbit/s) per snapshot date.
pub fn capacity_timeseries(snapshots: &[RawSnapshot]) -> Vec<(NaiveDate, f64)> {
    snapshots.iter().map(|s| (s.date, s.total_capacity())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eums {
    /// End-user market share, percent.
    pub percent: f64,
    pub national_rank: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthReport {
    pub malformed_rows: usize,
    pub duplicate_rows: usize,
}

/// External reference data: AS-to-country and per-country end-user shares.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub as_country: BTreeMap<u32, String>,
    pub eums: BTreeMap<(u32, String), Eums>,
    pub report: GroundTruthReport,
}

impl GroundTruth {
    pub fn eums_of(&self, asn: u32, country: &str) -> Option<Eums> {
        self.eums.get(&(asn, country.to_string())).copied()
    }

    /// Adds `asn,country` rows. Later rows override earlier ones.
    pub fn read_asorg(&mut self, input: &str) {
        for row in rows(input) {
            let parsed = (row.len() >= 2)
                .then(|| Some((row[0].parse::<u32>().ok()?, country_code(&row[1])?)))
                .flatten();
            match parsed {
                Some((asn, cc)) => {
                    if self.as_country.insert(asn, cc).is_some() {
                        self.report.duplicate_rows += 1;
                    }
                }
                None => self.report.malformed_rows += 1,
            }
        }
    }

    /// Adds `asn,country,eums_percent,national_rank` rows.
    pub fn read_apnic(&mut self, input: &str) {
        for row in rows(input) {
            let parsed = (row.len() >= 4)
                .then(|| {
                    let asn = row[0].parse::<u32>().ok()?;
                    let cc = country_code(&row[1])?;
                    let percent = row[2].parse::<f64>().ok()?;
                    let national_rank = row[3].parse::<u32>().ok()?;
                    (0.0..=100.0)
                        .contains(&percent)
                        .then_some((asn, cc, Eums { percent, national_rank }))
                })
                .flatten();
            match parsed {
                Some((asn, cc, e)) => {
                    if self.eums.insert((asn, cc), e).is_some() {
                        self.report.duplicate_rows += 1;
                    }
                }
                None => self.report.malformed_rows += 1,
            }
        }
    }
}

pub fn load_ground_truth(asorg_path: Option<&Path>, apnic_paths: &[PathBuf]) -> Result<GroundTruth> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
    let mut truth = GroundTruth::default();
    if let Some(p) = asorg_path {
        truth.read_asorg(&read(p)?);
    }
    for p in apnic_paths {
        truth.read_apnic(&read(p)?);
    }
    Ok(truth)
}

fn country_code(s: &str) -> Option<String> {
    let cc = s.trim().to_ascii_uppercase();
    (cc.len() == 2 && cc.chars().all(|c| c.is_ascii_alphabetic())).then_some(cc)
}

/// Splits delimiter-separated text into trimmed fields. The delimiter is
/// sniffed from the first data line (`|`, tab, then `,`). `#` lines are
/// comments; a first line whose leading field is not a number is a header.
fn rows(input: &str) -> Vec<Vec<String>> {
    let mut lines = input
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let Some(first) = lines.peek().copied() else {
        return Vec::new();
    };
    let delim = ['|', '\t', ','].into_iter().find(|d| first.contains(*d)).unwrap_or(',');
    let split = |l: &str| -> Vec<String> { l.split(delim).map(|f| f.trim().to_string()).collect() };
    let first_fields = split(first);
    if first_fields[0].parse::<u64>().is_err() {
        lines.next();
    }
    lines.map(split).collect()
}
