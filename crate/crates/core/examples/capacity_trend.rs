//! Total peering capacity over time and the best two-slope fit.
//!
//!     cargo run --example capacity_trend [-- snapshot_YYYY-MM-DD.json ...]

use std::path::PathBuf;

use chrono::{Duration, NaiveDate};
use peergraph::cgraph::breakpoint_fit_dated;
use peergraph::ingest::{capacity_timeseries, date_from_filename, parse_snapshot};

fn main() -> anyhow::Result<()> {
    let paths: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let series = if paths.is_empty() {
        // Without dumps, a made-up monthly series with a change of pace.
        let start = NaiveDate::from_ymd_opt(2018, 1, 1).unwrap();
        (0..36)
            .map(|m| {
                let t = m as f64;
                let gbps = if m <= 20 {
                    400.0 + 12.0 * t
                } else {
                    640.0 + 30.0 * (t - 20.0)
                };
                (start + Duration::days(30 * m), gbps * 1e3)
            })
            .collect()
    } else {
        let snaps = paths
            .iter()
            .map(|p| {
                let d = date_from_filename(p).ok_or_else(|| anyhow::anyhow!("no date in {}", p.display()))?;
                Ok(parse_snapshot(p, d)?)
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        capacity_timeseries(&snaps)
    };
    for (d, c) in &series {
        println!("{d} {:>10.1} Gbit/s", c / 1e3);
    }
    match breakpoint_fit_dated(&series) {
        Ok(fit) => println!(
            "break at {}: {:.1} then {:.1} Gbit/s per year",
            fit.breakpoint,
            fit.slope_before * 365.0 / 1e3,
            fit.slope_after * 365.0 / 1e3
        ),
        Err(e) => println!("no breakpoint fit: {e}"),
    }
    Ok(())
}
