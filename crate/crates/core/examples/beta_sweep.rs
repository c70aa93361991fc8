//! Rank stability of the largest ASes of every traffic class under changes
//! of the heavy and mostly imbalance parameters.

use chrono::NaiveDate;
use peergraph::analysis::{beta_stability_sweep, parse_grid, SweepOptions};
use peergraph::cgraph::{BetaParams, CGraph};
use peergraph::ingest::parse_snapshot;

fn main() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/snapshot_2020-01-01.json");
    let g = CGraph::build(
        &parse_snapshot(path, NaiveDate::from_ymd_opt(2020, 1, 1).unwrap())?,
        BetaParams::default(),
    )?;
    let opts = SweepOptions {
        grid_h: parse_grid("0.90:0.995:10")?,
        grid_m: parse_grid("0.6:0.8:10")?,
        ..Default::default()
    };
    let report = beta_stability_sweep(&g, &opts)?;
    println!("{} grid points, {} skipped", report.grid.len(), report.skipped);
    println!(
        "{:<8} {:<26} {:<4} {:>4} {:>4} {:>4} {:>4}",
        "AS", "name", "cls", "PR", "dPR", "rPR", "drPR"
    );
    for p in &report.probes {
        println!(
            "{:<8} {:<26} {:<4} {:>4} {:>4} {:>4} {:>4}",
            p.asn,
            p.name,
            p.class.code(),
            p.pr_rank,
            p.delta_pr,
            p.rpr_rank,
            p.delta_rpr
        );
    }
    Ok(())
}
