//! Country assignment, its accuracy against AS-org data, the top traffic
//! receivers per country and their end-user market share.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::NaiveDate;
use peergraph::analysis::{
    classification_metrics, classify_countries, eums_coverage, hypergiants, info_ratio_summary, traffic_receivers,
    ReceiverOptions,
};
use peergraph::cgraph::{BetaParams, CGraph};
use peergraph::ingest::{load_ground_truth, parse_snapshot};
use peergraph::spectral::{graph_pagerank, Direction, PageRankOptions};

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let snap = parse_snapshot(
        dir.join("snapshot_2020-01-01.json"),
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
    )?;
    let g = CGraph::build(&snap, BetaParams::default())?;
    let truth = load_ground_truth(Some(&dir.join("asorg.csv")), &[dir.join("apnic.csv")])?;

    for s in info_ratio_summary(&g) {
        println!(
            "{:<16} {:>3} ASes ({:>5.1}%), {:>5.1}% of capacity",
            s.class.label(),
            s.count,
            s.count_share,
            s.capacity_share
        );
    }

    let assign = classify_countries(&g);
    println!("{} ASes tied between countries", assign.tied_count());
    let report = classification_metrics(&assign, &truth, &[]);
    for r in &report.rows {
        println!(
            "{}: precision {:.2} recall {:.2} F1 {:.2} ({} ASes)",
            r.country, r.precision, r.recall, r.f1, r.support
        );
    }

    let opts = PageRankOptions::default();
    let hg: BTreeSet<u32> = hypergiants(&g, 5, opts)?
        .ids()
        .into_iter()
        .filter_map(|id| match id {
            peergraph::cgraph::NodeId::As(a) => Some(a),
            _ => None,
        })
        .collect();
    let pr = graph_pagerank(&g, Direction::Forward, opts)?;
    let receivers = traffic_receivers(
        &g,
        &pr,
        &assign,
        &ReceiverOptions {
            countries: vec!["DE".into(), "FR".into(), "BR".into()],
            hypergiants: hg,
            ..Default::default()
        },
    );
    for (c, cov) in receivers.iter().zip(eums_coverage(&receivers, &truth)) {
        let names: Vec<&str> = c.table.rows.iter().map(|r| g.node_name(r.node)).collect();
        println!("{}: {} -> {:.1}% of end users", c.country, names.join(", "), cov.eums);
    }
    Ok(())
}
