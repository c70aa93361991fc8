//! Build the c-graph and print balance, degree and connectivity statistics.

use chrono::NaiveDate;
use peergraph::cgraph::{
    degree_distribution, degrees, ixp_balance, largest_component_fraction, powerlaw_fit, BetaParams, CGraph, Side,
};
use peergraph::ingest::parse_snapshot;

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/snapshot_2020-01-01.json").into());
    let snap = parse_snapshot(&path, NaiveDate::from_ymd_opt(2020, 1, 1).unwrap())?;
    let g = CGraph::build(&snap, BetaParams::default())?;
    println!("{} ASes, {} IXPs, {} links", g.n_as(), g.n_ixp(), g.edges().len());
    println!(
        "largest component holds {:.1}% of nodes",
        100.0 * largest_component_fraction(&g)
    );

    let balance = ixp_balance(&g);
    if let Some(s) = balance.summary {
        let (q1, q2, q3) = s.quartiles;
        println!(
            "IXP balance mean {:.3} std {:.3} quartiles {q1:.3} {q2:.3} {q3:.3}",
            s.mean, s.std
        );
    }

    for (side, label) in [(Side::As, "AS"), (Side::Ixp, "IXP")] {
        let dist = degree_distribution(&g, side);
        let head: Vec<String> = dist.iter().take(5).map(|(k, p)| format!("{k}:{p:.2}")).collect();
        println!("{label} degree distribution {}", head.join(" "));
        let samples: Vec<u64> = degrees(&g, side).into_iter().map(|d| d as u64).collect();
        match powerlaw_fit(&samples, None) {
            Ok(fit) => println!(
                "  power law gamma {:.2} from k >= {} ({} nodes)",
                fit.gamma, fit.xmin, fit.n_tail
            ),
            Err(e) => println!("  no power-law fit: {e}"),
        }
    }
    Ok(())
}
