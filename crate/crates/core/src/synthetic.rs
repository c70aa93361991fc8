//! Seeded random snapshots and graphs for tests, benchmarks and examples.

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cgraph::{BetaParams, CGraph};
use crate::ingest::{IngestReport, IxpRecord, MembershipRecord, NetworkRecord, RawSnapshot, TrafficClass};
use crate::Result;

const COUNTRIES: [&str; 6] = ["DE", "FR", "US", "BR", "GB", "NL"];
const TYPES: [&str; 4] = ["Cable/DSL/ISP", "NSP", "Content", "Not Disclosed"];
const PORTS: [f64; 5] = [100.0, 1_000.0, 10_000.0, 40_000.0, 100_000.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotShape {
    pub n_as: usize,
    pub n_ixp: usize,
    /// Each AS joins between 1 and this many IXPs.
    pub max_memberships: usize,
    /// Router ports per membership, at least 1.
    pub max_ports: usize,
}

impl Default for SnapshotShape {
    fn default() -> Self {
        SnapshotShape {
            n_as: 40,
            n_ixp: 8,
            max_memberships: 4,
            max_ports: 2,
        }
    }
}

/// Random snapshot where every AS has at least one positive-capacity port.
/// Some IXPs may end up without members.
pub fn random_snapshot(seed: u64, shape: SnapshotShape) -> RawSnapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let networks: Vec<NetworkRecord> = (0..shape.n_as)
        .map(|i| {
            let asn = 64_000 + i as u32;
            NetworkRecord {
                asn,
                name: format!("AS{asn} network"),
                info_ratio: *TrafficClass::ALL.choose(&mut rng).unwrap(),
                info_scope: "Regional".into(),
                info_type: TYPES.choose(&mut rng).unwrap().to_string(),
            }
        })
        .collect();
    let ixps: Vec<IxpRecord> = (0..shape.n_ixp)
        .map(|i| IxpRecord {
            ixp_id: i as u32 + 1,
            name: format!("IX {}", i + 1),
            country: COUNTRIES.choose(&mut rng).unwrap().to_string(),
        })
        .collect();
    let mut memberships = Vec::new();
    let ixp_ids: Vec<u32> = ixps.iter().map(|x| x.ixp_id).collect();
    for n in &networks {
        let k = rng.gen_range(1..=shape.max_memberships.clamp(1, shape.n_ixp));
        for &ix in ixp_ids.choose_multiple(&mut rng, k) {
            for _ in 0..rng.gen_range(1..=shape.max_ports.max(1)) {
                memberships.push(MembershipRecord {
                    asn: n.asn,
                    ixp_id: ix,
                    port_size: *PORTS.choose(&mut rng).unwrap(),
                });
            }
        }
    }
    RawSnapshot {
        date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
        networks,
        ixps,
        memberships,
        report: IngestReport::default(),
    }
}

pub fn random_graph(seed: u64, shape: SnapshotShape, beta: BetaParams) -> Result<CGraph> {
    CGraph::build(&random_snapshot(seed, shape), beta)
}

/// AS number of the dominant network in [`dominant_outbound_graph`].
pub const DOMINANT_ASN: u32 = 1;

/// A heavy-outbound AS present at every IXP with `factor` times the
/// capacity of any other port there, amid a random population.
pub fn dominant_outbound_graph(seed: u64, shape: SnapshotShape, factor: f64, beta: BetaParams) -> Result<CGraph> {
    let mut s = random_snapshot(seed, shape);
    let biggest = s.memberships.iter().map(|m| m.port_size).fold(0.0, f64::max);
    s.networks.insert(
        0,
        NetworkRecord {
            asn: DOMINANT_ASN,
            name: "Dominant content".into(),
            info_ratio: TrafficClass::HeavyOutbound,
            info_scope: "Global".into(),
            info_type: "Content".into(),
        },
    );
    for x in &s.ixps {
        let local: f64 = s
            .memberships
            .iter()
            .filter(|m| m.ixp_id == x.ixp_id)
            .map(|m| m.port_size)
            .sum();
        s.memberships.push(MembershipRecord {
            asn: DOMINANT_ASN,
            ixp_id: x.ixp_id,
            port_size: factor * local.max(biggest),
        });
    }
    CGraph::build(&s, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = random_snapshot(3, SnapshotShape::default());
        let b = random_snapshot(3, SnapshotShape::default());
        assert_eq!(a, b);
        assert_ne!(a, random_snapshot(4, SnapshotShape::default()));
    }

    #[test]
    fn every_as_is_connected() {
        let g = random_graph(1, SnapshotShape::default(), BetaParams::default()).unwrap();
        assert_eq!(g.n_as(), 40);
    }

    #[test]
    fn dominant_everywhere() {
        let g = dominant_outbound_graph(2, SnapshotShape::default(), 10.0, BetaParams::default()).unwrap();
        assert_eq!(g.as_nodes()[0].asn, DOMINANT_ASN);
        assert_eq!(g.edges().iter().filter(|e| e.as_index == 0).count(), g.n_ixp());
    }
}
