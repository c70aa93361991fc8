//! Reduced Google matrix of a few hypergiants and exchanges on two dates,
//! and the relative change between them.

use chrono::NaiveDate;
use peergraph::cgraph::{BetaParams, CGraph, NodeId};
use peergraph::ingest::parse_snapshot;
use peergraph::spectral::{
    censor_diagonal, reduced_google_matrix, relative_change, Direction, GoogleMatrix, ReduceOptions,
    ReducedGoogleMatrix,
};

const SUBSET: [&str; 6] = ["AS32934", "AS16509", "AS20940", "AS15169", "IX1", "IX4"];

fn reduced(date: &str) -> anyhow::Result<ReducedGoogleMatrix> {
    let d: NaiveDate = date.parse()?;
    let path = format!("{}/fixtures/snapshot_{date}.json", env!("CARGO_MANIFEST_DIR"));
    let g = CGraph::build(&parse_snapshot(path, d)?, BetaParams::default())?;
    let subset = SUBSET
        .iter()
        .map(|s| {
            let id: NodeId = s.parse()?;
            g.index_of(id)
                .ok_or_else(|| anyhow::anyhow!("{s} not in the {date} graph"))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let gm = GoogleMatrix::new(&g, 0.85, Direction::Reverse)?;
    let mut r = censor_diagonal(&reduced_google_matrix(&gm, &subset, ReduceOptions::default())?)?;
    r.date = Some(d);
    Ok(r)
}

fn print(title: &str, labels: &[String], cell: impl Fn(usize, usize) -> f64) {
    println!("{title}");
    print!("{:>9}", "");
    for l in labels {
        print!("{l:>9}");
    }
    println!();
    for (i, l) in labels.iter().enumerate() {
        print!("{l:>9}");
        for j in 0..labels.len() {
            print!("{:>9.3}", cell(i, j));
        }
        println!();
    }
}

fn main() -> anyhow::Result<()> {
    let r1 = reduced("2020-01-01")?;
    let r2 = reduced("2020-06-01")?;
    print("censored G_R, 2020-01-01 (column = from)", &r1.labels, |i, j| {
        r1.gr.get(i, j)
    });
    let mut change = relative_change(&r1, &r2)?;
    change.cap = Some((-0.5, 1.0));
    let shown = change.display();
    print("relative change to 2020-06-01, capped", &change.labels, |i, j| {
        shown.get(i, j)
    });
    println!("{} undefined cells", change.undefined_count());
    Ok(())
}
