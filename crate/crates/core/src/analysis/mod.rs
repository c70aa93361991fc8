//! Ecosystem views over a built graph: where ASes sit geographically, who
//! sends and who receives traffic, how capacity splits across declared
//! traffic ratios, and how stable rankings are when `beta` moves.

mod actors;
mod countries;
mod sweep;

pub use actors::{
    eums_coverage, hypergiants, info_ratio_summary, parse_business_types, traffic_receivers, write_receivers_csv,
    ClassShare, CountryReceivers, EumsCoverage, ReceiverOptions, DEFAULT_BUSINESS_TYPES,
};
pub use countries::{
    classification_metrics, classify_countries, classify_countries_with, ClassificationReport, CountryAssignment,
    CountryMetrics, MajorityRule, TIED,
};
pub use sweep::{
    beta_stability_sweep, default_probes, parse_grid, ProbeStability, RankScope, StabilityReport, SweepOptions,
};
