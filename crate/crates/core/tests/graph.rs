mod common;

use std::collections::BTreeSet;

use chrono::NaiveDate;
use peergraph::analysis::{
    beta_stability_sweep, classify_countries, hypergiants, info_ratio_summary, traffic_receivers, ReceiverOptions,
    SweepOptions,
};
use peergraph::cgraph::{ixp_balance, node_metrics, BetaParams, CGraph};
use peergraph::ingest::{
    capacity_timeseries, parse_snapshot, parse_snapshot_bytes, IxpRecord, MembershipRecord, NetworkRecord, Orientation,
    RawSnapshot, TrafficClass,
};
use peergraph::spectral::{graph_pagerank, Direction, PageRankOptions};
use peergraph::synthetic::{random_snapshot, SnapshotShape};
use proptest::prelude::*;

fn small_shape() -> SnapshotShape {
    SnapshotShape {
        n_as: 25,
        n_ixp: 6,
        max_memberships: 3,
        max_ports: 3,
    }
}

fn beta_strategy() -> impl Strategy<Value = BetaParams> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(b, m, h)| BetaParams::new(b, m, h).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_follow_the_class(seed in 0u64..10_000, beta in beta_strategy()) {
        let s = random_snapshot(seed, small_shape());
        let g = CGraph::build(&s, beta).unwrap();
        for e in g.edges() {
            let class = g.class_of(e.as_index);
            let (to_as, to_ixp) = g.edge_weights(e);
            let low = (1.0 - beta.for_class(class)) * e.ps;
            match class.orientation() {
                Orientation::Outbound => prop_assert_eq!((to_as, to_ixp), (low, e.ps)),
                _ => prop_assert_eq!((to_as, to_ixp), (e.ps, low)),
            }
            prop_assert_eq!(to_as.max(to_ixp), e.ps);
        }
        let m = node_metrics(&g);
        for a in 0..g.n_as() {
            let low = (1.0 - beta.for_class(g.class_of(a))) * m.port_capacity[a];
            let (w_in, w_out) = match g.class_of(a).orientation() {
                Orientation::Outbound => (low, m.port_capacity[a]),
                _ => (m.port_capacity[a], low),
            };
            prop_assert!((m.w_in[a] - w_in).abs() <= 1e-9 * m.port_capacity[a]);
            prop_assert!((m.w_out[a] - w_out).abs() <= 1e-9 * m.port_capacity[a]);
        }
        let total: f64 = g.edges().iter().map(|e| e.ps).sum();
        let as_side: f64 = m.port_capacity[..g.n_as()].iter().sum();
        let ixp_side: f64 = m.port_capacity[g.n_as()..].iter().sum();
        prop_assert!((as_side - total).abs() <= 1e-9 * total && (ixp_side - total).abs() <= 1e-9 * total);
        for (_, b) in ixp_balance(&g).values {
            if let Some(b) = b {
                prop_assert!((-1.0..=1.0).contains(&b));
            }
        }
    }

    #[test]
    fn triplets_are_bipartite(seed in 0u64..10_000) {
        let g = CGraph::build(&random_snapshot(seed, small_shape()), BetaParams::default()).unwrap();
        for (r, c, w) in g.weight_triplets() {
            prop_assert!(w > 0.0);
            prop_assert!(g.is_as(r) != g.is_as(c));
        }
    }

    #[test]
    fn all_balanced_gives_zero_balance(seed in 0u64..10_000) {
        let mut s = random_snapshot(seed, small_shape());
        for n in &mut s.networks {
            n.info_ratio = if n.asn % 2 == 0 { TrafficClass::Balanced } else { TrafficClass::NotDisclosed };
        }
        let g = CGraph::build(&s, BetaParams::default()).unwrap();
        prop_assert!(ixp_balance(&g).values.iter().all(|(_, b)| *b == Some(0.0)));
    }

    #[test]
    fn capacity_series_is_additive(seed in 0u64..10_000, split in 0usize..200) {
        let s = random_snapshot(seed, small_shape());
        let cut = split.min(s.memberships.len());
        let mut a = s.clone();
        let mut b = s.clone();
        a.memberships.truncate(cut);
        b.memberships.drain(..cut);
        let whole = capacity_timeseries(std::slice::from_ref(&s))[0].1;
        let parts = capacity_timeseries(&[a])[0].1 + capacity_timeseries(&[b])[0].1;
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.max(1.0));
    }

    #[test]
    fn country_votes_ignore_port_sizes(seed in 0u64..10_000, scale in 0.01f64..100.0) {
        let s = random_snapshot(seed, small_shape());
        let mut t = s.clone();
        for (k, m) in t.memberships.iter_mut().enumerate() {
            m.port_size *= scale * (1.0 + (k % 3) as f64);
        }
        let a = classify_countries(&CGraph::build(&s, BetaParams::default()).unwrap());
        let b = classify_countries(&CGraph::build(&t, BetaParams::default()).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn country_votes_ignore_ixp_ids(seed in 0u64..10_000) {
        let s = random_snapshot(seed, small_shape());
        let n = s.ixps.len() as u32;
        let relabel = |id: u32| n + 1 - id;
        let mut t = s.clone();
        for x in &mut t.ixps {
            x.ixp_id = relabel(x.ixp_id);
        }
        t.ixps.sort_by_key(|x| x.ixp_id);
        for m in &mut t.memberships {
            m.ixp_id = relabel(m.ixp_id);
        }
        let a = classify_countries(&CGraph::build(&s, BetaParams::default()).unwrap());
        let b = classify_countries(&CGraph::build(&t, BetaParams::default()).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn shares_sum_to_hundred(seed in 0u64..10_000) {
        let g = CGraph::build(&random_snapshot(seed, small_shape()), BetaParams::default()).unwrap();
        let s = info_ratio_summary(&g);
        prop_assert!((s.iter().map(|c| c.count_share).sum::<f64>() - 100.0).abs() < 1e-9);
        prop_assert!((s.iter().map(|c| c.capacity_share).sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn receivers_avoid_hypergiants_and_exclusions(seed in 0u64..10_000, excluded in 64_000u32..64_025) {
        let g = CGraph::build(&random_snapshot(seed, small_shape()), BetaParams::default()).unwrap();
        let hyper: BTreeSet<u32> = hypergiants(&g, 3, PageRankOptions::default())
            .unwrap()
            .rows
            .iter()
            .map(|r| g.as_nodes()[r.node].asn)
            .collect();
        let pr = graph_pagerank(&g, Direction::Forward, PageRankOptions::default()).unwrap();
        let opts = ReceiverOptions {
            countries: ["DE", "FR", "US", "BR", "GB", "NL"].iter().map(|s| s.to_string()).collect(),
            hypergiants: hyper.clone(),
            exclude: [excluded].into(),
            ..Default::default()
        };
        for c in traffic_receivers(&g, &pr, &classify_countries(&g), &opts) {
            prop_assert!(c.table.len() <= 4);
            for r in &c.table.rows {
                let asn = g.as_nodes()[r.node].asn;
                prop_assert!(!hyper.contains(&asn) && asn != excluded);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sweep_spread_grows_with_the_grid(seed in 0u64..1000, k in 1usize..4) {
        let g = CGraph::build(&random_snapshot(seed, small_shape()), BetaParams::default()).unwrap();
        let grid = |n: usize, a: f64, b: f64| (0..n).map(|i| a + (b - a) * i as f64 / 4.0).collect::<Vec<_>>();
        let small = SweepOptions { grid_h: grid(k, 0.9, 0.99), grid_m: grid(k, 0.6, 0.8), ..Default::default() };
        let large = SweepOptions { grid_h: grid(k + 1, 0.9, 0.99), grid_m: grid(k + 1, 0.6, 0.8), ..Default::default() };
        let a = beta_stability_sweep(&g, &small).unwrap();
        let b = beta_stability_sweep(&g, &large).unwrap();
        for (p, q) in a.probes.iter().zip(&b.probes) {
            prop_assert_eq!(p.asn, q.asn);
            prop_assert!(q.delta_pr >= p.delta_pr && q.delta_rpr >= p.delta_rpr);
        }
    }
}

#[test]
fn parse_is_pure() {
    let path = common::fixture("snapshot_2020-01-01.json");
    let d = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let a = parse_snapshot(&path, d).unwrap();
    let b = parse_snapshot_bytes(&std::fs::read(&path).unwrap(), d).unwrap();
    assert_eq!(a, b);
    for m in &a.memberships {
        assert!(a.network(m.asn).is_some() && a.ixp(m.ixp_id).is_some());
    }
}

#[test]
fn router_ports_are_summed() {
    let s = RawSnapshot {
        date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
        networks: vec![NetworkRecord {
            asn: 1,
            name: String::new(),
            info_ratio: TrafficClass::Balanced,
            info_scope: String::new(),
            info_type: String::new(),
        }],
        ixps: vec![IxpRecord {
            ixp_id: 1,
            name: String::new(),
            country: "DE".into(),
        }],
        memberships: vec![
            MembershipRecord {
                asn: 1,
                ixp_id: 1,
                port_size: 10.0,
            },
            MembershipRecord {
                asn: 1,
                ixp_id: 1,
                port_size: 20.0,
            },
            MembershipRecord {
                asn: 1,
                ixp_id: 1,
                port_size: 0.0,
            },
        ],
        report: Default::default(),
    };
    let g = CGraph::build(&s, BetaParams::default()).unwrap();
    assert_eq!(g.edges().len(), 1);
    assert_eq!(g.edges()[0].ps, 30.0);
}
