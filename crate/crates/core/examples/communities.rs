//! Bipartite Louvain communities of the peering graph and their profiles.

use chrono::NaiveDate;
use peergraph::cgraph::{BetaParams, CGraph};
use peergraph::clustering::{cluster_profile, louvain_bipartite, symmetrize, LouvainOptions};
use peergraph::ingest::parse_snapshot;

fn main() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/snapshot_2020-01-01.json");
    let g = CGraph::build(
        &parse_snapshot(path, NaiveDate::from_ymd_opt(2020, 1, 1).unwrap())?,
        BetaParams::default(),
    )?;
    let p = louvain_bipartite(&symmetrize(&g), LouvainOptions::default());
    println!("{} communities, modularity {:.4}", p.n_communities(), p.modularity);
    println!(
        "history {:?}",
        p.history.iter().map(|q| format!("{q:.4}")).collect::<Vec<_>>()
    );
    for c in cluster_profile(&p, &g)? {
        println!(
            "#{}: {} ASes, {} IXPs, {:.1}% of capacity, {:.1}% of IXPs, IXP countries {}",
            c.community,
            c.n_as,
            c.n_ixp,
            c.capacity_share,
            c.ixp_share,
            c.country_summary(3)
        );
    }
    Ok(())
}
