//! Rank ASes by reverse PageRank and compare with forward PageRank.

use chrono::NaiveDate;
use peergraph::analysis::hypergiants;
use peergraph::cgraph::{BetaParams, CGraph, NodeId};
use peergraph::ingest::parse_snapshot;
use peergraph::spectral::{graph_pagerank, rank_table, Direction, PageRankOptions};

fn main() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/snapshot_2020-01-01.json");
    let g = CGraph::build(
        &parse_snapshot(path, NaiveDate::from_ymd_opt(2020, 1, 1).unwrap())?,
        BetaParams::default(),
    )?;
    let opts = PageRankOptions::default();

    let pr = graph_pagerank(&g, Direction::Forward, opts)?;
    let pr_ranks = rank_table(&pr, &g.node_ids(), NodeId::is_as);
    println!(
        "{:>4}  {:<10} {:<28} {:>10}  {:>7}",
        "rPR", "AS", "name", "value", "PR rank"
    );
    for r in &hypergiants(&g, 10, opts)?.rows {
        println!(
            "{:>4}  {:<10} {:<28} {:>10.6}  {:>7}",
            r.rank,
            r.id.to_string(),
            g.node_name(r.node),
            r.value,
            pr_ranks.rank_of(r.id).unwrap()
        );
    }
    Ok(())
}
