//! Write the graph as GEXF for a graph viewer, with AS countries.
//!
//!     cargo run --example gexf_export -- out.gexf

use std::fs::File;
use std::io::BufWriter;

use chrono::NaiveDate;
use peergraph::analysis::classify_countries;
use peergraph::cgraph::{write_gexf, BetaParams, CGraph};
use peergraph::ingest::parse_snapshot;

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "peering.gexf".into());
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/snapshot_2020-01-01.json");
    let g = CGraph::build(
        &parse_snapshot(path, NaiveDate::from_ymd_opt(2020, 1, 1).unwrap())?,
        BetaParams::default(),
    )?;
    let countries = classify_countries(&g);
    write_gexf(&g, Some(&countries.countries), BufWriter::new(File::create(&out)?))?;
    println!(
        "wrote {} nodes and {} weighted links to {out}",
        g.n(),
        g.weight_triplets().len()
    );
    Ok(())
}
