//! Parse a dump, print what was dropped, and flag capacity outliers.
//!
//!     cargo run --example ingest_dump [-- snapshot.json [reference-asn]]

use std::path::PathBuf;

use peergraph::ingest::{date_from_filename, parse_snapshot, validate_snapshot, DEFAULT_OUTLIER_FACTOR};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/snapshot_2020-01-01.json"));
    let reference: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20940);

    let date = date_from_filename(&path).ok_or_else(|| anyhow::anyhow!("no date in {}", path.display()))?;
    let snap = parse_snapshot(&path, date)?;
    println!(
        "{}: {} networks, {} IXPs, {} ports, {:.1} Tbit/s",
        snap.date,
        snap.networks.len(),
        snap.ixps.len(),
        snap.memberships.len(),
        snap.total_capacity() / 1e6
    );
    println!("dropped {} records: {:?}", snap.report.dropped(), snap.report);

    let caps = snap.capacity_by_as();
    let Some(&ref_cap) = caps.get(&reference) else {
        anyhow::bail!("AS{reference} has no ports in this dump");
    };
    for o in validate_snapshot(&snap, ref_cap, DEFAULT_OUTLIER_FACTOR)? {
        println!(
            "outlier AS{} {:?}: {:.0} Mbit/s, {:.1}x AS{reference}",
            o.asn, o.name, o.capacity, o.ratio
        );
    }
    Ok(())
}
