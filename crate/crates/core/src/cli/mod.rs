//! The `peergraph` command line.
//!
//! Every subcommand that writes a file also writes `<file>.manifest.json`
//! with the command line, input and output SHA-256 digests and the
//! parameters used. Relative `--out` paths are resolved against
//! `$PEERGRAPH_OUT_DIR` when it is set.

mod output;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use output::{resolve_out, sha256_hex, write_atomic, FileDigest, Run, RunManifest, OUT_DIR_ENV};

use crate::analysis::{self, MajorityRule, RankScope, ReceiverOptions, SweepOptions};
use crate::cgraph::{self, BetaParams, BuildOptions, CGraph, NodeId};
use crate::clustering::{self, LouvainOptions};
use crate::ingest::{self, GroundTruth, RawSnapshot};
use crate::spectral::{self, Direction, GoogleMatrix, PageRankOptions, ReduceOptions};

#[derive(Debug, Parser)]
#[command(
    name = "peergraph",
    version,
    about = "AS-IXP peering capacity graphs from PeeringDB dumps"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a dump and report record counts, optionally screening outliers.
    Ingest(IngestArgs),
    /// Build the graph file from a dump.
    Build(BuildArgs),
    /// PageRank or reverse PageRank table.
    Rank(RankArgs),
    /// Reduced Google matrix of a node subset.
    Reduce(ReduceArgs),
    /// Relative change between two reduced matrices.
    Diff(DiffArgs),
    /// Country of every AS by majority of its IXPs.
    Classify(ClassifyArgs),
    /// Top ASes by reverse PageRank.
    Hypergiants(HypergiantArgs),
    /// Top traffic receivers per country.
    Receivers(ReceiverArgs),
    /// Rank stability of probe ASes over a beta grid.
    Sweep(SweepArgs),
    /// Louvain communities with bipartite modularity.
    Cluster(ClusterArgs),
    /// Graph export for other tools.
    Export(ExportArgs),
    /// Total port capacity per dump date.
    Timeseries(TimeseriesArgs),
}

#[derive(Debug, Args)]
pub struct SnapshotArg {
    /// PeeringDB dump (JSON).
    #[arg(long)]
    pub snapshot: PathBuf,
    /// Dump date; taken from the file name when omitted.
    #[arg(long)]
    pub date: Option<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: SnapshotArg,
    /// Report ASes whose capacity exceeds a multiple of a reference AS.
    #[arg(long)]
    pub validate: bool,
    #[arg(long, requires = "validate")]
    pub reference_asn: Option<u32>,
    #[arg(long, default_value_t = ingest::DEFAULT_OUTLIER_FACTOR)]
    pub outlier_factor: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    #[arg(long, default_value_t = 0.95)]
    pub beta_h: f64,
    #[arg(long, default_value_t = 0.75)]
    pub beta_m: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta_b: f64,
}

impl BetaArgs {
    fn params(&self) -> Result<BetaParams> {
        Ok(BetaParams::new(self.beta_b, self.beta_m, self.beta_h)?)
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub input: SnapshotArg,
    #[command(flatten)]
    pub beta: BetaArgs,
    /// Drop IXPs with fewer members (after removing empty ports).
    #[arg(long, default_value_t = 1)]
    pub min_members: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PageRankArgs {
    #[arg(long, default_value_t = spectral::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

impl PageRankArgs {
    fn options(&self) -> PageRankOptions {
        PageRankOptions {
            alpha: self.alpha,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "forward")]
    pub direction: Direction,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
    /// Rank ASes only.
    #[arg(long)]
    pub ases_only: bool,
    /// Keep the first k rows.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Node list: one `AS<n>`, `IX<n>` or bare AS number per line or comma.
    #[arg(long)]
    pub subset: PathBuf,
    #[arg(long, default_value = "reverse")]
    pub direction: Direction,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
    #[arg(long)]
    pub censor_diagonal: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    /// Earlier and later matrix CSV.
    #[arg(long, num_args = 2, value_names = ["M1", "M2"])]
    pub reduced: Vec<PathBuf>,
    /// Clamp written values to [LO, HI].
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub cap: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Accept a unique plurality instead of a strict majority.
    #[arg(long)]
    pub plurality: bool,
    /// Reference AS-to-country table for precision/recall.
    #[arg(long)]
    pub asorg: Option<PathBuf>,
    /// Countries to score (default: every reference country present).
    #[arg(long, value_delimiter = ',')]
    pub countries: Vec<String>,
    #[arg(long, requires = "asorg")]
    pub metrics_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HypergiantArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReceiverArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub countries: Vec<String>,
    /// Business types: ISP, ND, NSP, Content or literal PeeringDB labels.
    #[arg(long, default_value = "ISP,ND")]
    pub types: String,
    /// AS numbers to leave out, one per line.
    #[arg(long)]
    pub exclude: Option<PathBuf>,
    /// Size of the hypergiant set removed from the candidates.
    #[arg(long, default_value_t = 20)]
    pub hypergiants: usize,
    #[arg(long, default_value_t = 4)]
    pub top: usize,
    #[arg(long)]
    pub plurality: bool,
    /// APNIC per-AS tables; adds an EUMS coverage table.
    #[arg(long, num_args = 1..)]
    pub apnic: Vec<PathBuf>,
    #[arg(long, requires = "apnic")]
    pub eums_out: Option<PathBuf>,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, conflicts_with = "snapshot")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[arg(long)]
    pub date: Option<NaiveDate>,
    /// `start:end:count`, a comma list or one value.
    #[arg(long, default_value = "0.9:1.0:20")]
    pub grid_h: String,
    #[arg(long, default_value = "0.6:0.8:20")]
    pub grid_m: String,
    /// Probe AS numbers (default: top 4 capacity per traffic class).
    #[arg(long, value_delimiter = ',')]
    pub probes: Vec<u32>,
    /// Rank among ASes only instead of all nodes.
    #[arg(long)]
    pub ases_only: bool,
    #[command(flatten)]
    pub pagerank: PageRankArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Shuffle the visit order with this seed (default: ascending order).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub max_passes: usize,
    /// Extra shuffled runs; the best partition is kept.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExportFormat {
    Gexf,
    Edgelist,
    Csv,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "gexf")]
    pub format: ExportFormat,
    /// Give AS nodes their majority-IXP country in GEXF output.
    #[arg(long)]
    pub with_countries: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TimeseriesArgs {
    /// Dumps whose names contain their date (YYYY-MM-DD).
    #[arg(long, num_args = 1.., required = true)]
    pub snapshots: Vec<PathBuf>,
    /// Also fit two line segments to the series.
    #[arg(long)]
    pub breakpoint: bool,
    #[arg(long, requires = "breakpoint")]
    pub fit_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the subcommand. `--help`
/// and `--version` print and return `Ok`.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            e.print()?;
            return Ok(());
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            bail!("{}", first.trim_start_matches("error: "));
        }
    };
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure thread pool")?;
    }
    let command: Vec<String> = std::iter::once("peergraph".to_string())
        .chain(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect();
    let mut run = Run::new(command);
    match &cli.command {
        Command::Ingest(a) => ingest_cmd(&mut run, a)?,
        Command::Build(a) => build_cmd(&mut run, a)?,
        Command::Rank(a) => rank_cmd(&mut run, a)?,
        Command::Reduce(a) => reduce_cmd(&mut run, a)?,
        Command::Diff(a) => diff_cmd(&mut run, a)?,
        Command::Classify(a) => classify_cmd(&mut run, a)?,
        Command::Hypergiants(a) => hypergiants_cmd(&mut run, a)?,
        Command::Receivers(a) => receivers_cmd(&mut run, a)?,
        Command::Sweep(a) => sweep_cmd(&mut run, a)?,
        Command::Cluster(a) => cluster_cmd(&mut run, a)?,
        Command::Export(a) => export_cmd(&mut run, a)?,
        Command::Timeseries(a) => timeseries_cmd(&mut run, a)?,
    }
    run.finish()
}

fn load_snapshot(run: &mut Run, path: &Path, date: Option<NaiveDate>) -> Result<RawSnapshot> {
    let date = match date.or_else(|| ingest::date_from_filename(path)) {
        Some(d) => d,
        None => bail!("no --date given and none found in {}", path.display()),
    };
    let bytes = run.read(path)?;
    ingest::parse_snapshot_bytes(&bytes, date).with_context(|| format!("cannot parse {}", path.display()))
}

fn load_graph(run: &mut Run, path: &Path) -> Result<CGraph> {
    let bytes = run.read(path)?;
    cgraph::read_graph(bytes.as_slice()).with_context(|| format!("cannot load graph {}", path.display()))
}

fn csv_rows(out: &mut Vec<u8>, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| crate::Error::io("<table stream>", e))
}

fn ingest_cmd(run: &mut Run, a: &IngestArgs) -> Result<()> {
    let s = load_snapshot(run, &a.input.snapshot, a.input.date)?;
    run.params(json!({ "date": s.date, "validate": a.validate, "reference_asn": a.reference_asn, "outlier_factor": a.outlier_factor }))?;
    if a.validate {
        let Some(reference) = a.reference_asn else {
            bail!("--validate needs --reference-asn");
        };
        let caps = s.capacity_by_as();
        let Some(&reference_capacity) = caps.get(&reference) else {
            bail!("reference AS{reference} has no capacity in the snapshot");
        };
        let outliers = ingest::validate_snapshot(&s, reference_capacity, a.outlier_factor)?;
        return run.emit(a.out.as_deref(), |buf| {
            csv_rows(
                buf,
                &["asn", "name", "capacity", "ratio", "memberships"],
                outliers.iter().map(|o| {
                    let m: Vec<String> = o.memberships.iter().map(|(ix, ps)| format!("IX{ix}:{ps}")).collect();
                    vec![
                        o.asn.to_string(),
                        o.name.clone(),
                        o.capacity.to_string(),
                        o.ratio.to_string(),
                        m.join(" "),
                    ]
                }),
            )
        });
    }
    let r = &s.report;
    let rows = [
        ("date", s.date.to_string()),
        ("networks", s.networks.len().to_string()),
        ("ixps", s.ixps.len().to_string()),
        ("memberships", s.memberships.len().to_string()),
        ("total_capacity_mbps", s.total_capacity().to_string()),
        ("malformed_networks", r.malformed_networks.to_string()),
        ("malformed_ixps", r.malformed_ixps.to_string()),
        ("malformed_memberships", r.malformed_memberships.to_string()),
        ("duplicate_networks", r.duplicate_networks.to_string()),
        ("duplicate_ixps", r.duplicate_ixps.to_string()),
        ("unresolved_memberships", r.unresolved_memberships.to_string()),
    ];
    run.emit(a.out.as_deref(), |buf| {
        csv_rows(
            buf,
            &["field", "value"],
            rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]),
        )
    })
}

fn build_cmd(run: &mut Run, a: &BuildArgs) -> Result<()> {
    let s = load_snapshot(run, &a.input.snapshot, a.input.date)?;
    let beta = a.beta.params()?;
    run.params(json!({ "date": s.date, "beta": beta, "min_members": a.min_members }))?;
    let g = CGraph::build_with(
        &s,
        beta,
        BuildOptions {
            min_members: a.min_members,
        },
    )?;
    run.write(&a.out, |buf| cgraph::write_graph(&g, buf))?;
    let balance = cgraph::ixp_balance(&g);
    let mut lines = vec![
        format!("ases,{}", g.n_as()),
        format!("ixps,{}", g.n_ixp()),
        format!("links,{}", g.edges().len()),
        format!("largest_component,{}", cgraph::largest_component_fraction(&g)),
    ];
    if let Some(b) = balance.summary {
        lines.push(format!("balance_mean,{}", b.mean));
        lines.push(format!("balance_std,{}", b.std));
        lines.push(format!(
            "balance_quartiles,{} {} {}",
            b.quartiles.0, b.quartiles.1, b.quartiles.2
        ));
    }
    let mut out = std::io::stdout().lock();
    for l in lines {
        writeln!(out, "{l}")?;
    }
    Ok(())
}

fn rank_cmd(run: &mut Run, a: &RankArgs) -> Result<()> {
    let g = load_graph(run, &a.graph)?;
    let opts = a.pagerank.options();
    run.params(json!({ "direction": a.direction, "pagerank": opts, "ases_only": a.ases_only, "top": a.top }))?;
    let p = spectral::graph_pagerank(&g, a.direction, opts)?;
    let ids = g.node_ids();
    let mut table = if a.ases_only {
        spectral::rank_table(&p, &ids, NodeId::is_as)
    } else {
        spectral::rank_table(&p, &ids, |_| true)
    };
    if let Some(k) = a.top {
        table = table.top(k);
    }
    run.emit(a.out.as_deref(), |buf| table.write_csv(buf))
}

/// Node list from text: `AS<n>`, `IX<n>` or bare AS numbers, separated by
/// newlines or commas; `#` starts a comment.
pub fn parse_node_list(text: &str) -> Result<Vec<NodeId>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(','))
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<NodeId>().map_err(|_| anyhow::anyhow!("bad node {t:?}")))
        .collect()
}

fn reduce_cmd(run: &mut Run, a: &ReduceArgs) -> Result<()> {
    let g = load_graph(run, &a.graph)?;
    let nodes = parse_node_list(&run.read_string(&a.subset)?)?;
    let subset: Vec<usize> = nodes
        .iter()
        .map(|id| g.index_of(*id).with_context(|| format!("{id} is not in the graph")))
        .collect::<Result<_>>()?;
    let opts = ReduceOptions {
        tol: a.pagerank.tol,
        max_iter: a.pagerank.max_iter,
    };
    run.params(json!({ "direction": a.direction, "alpha": a.pagerank.alpha, "reduce": opts, "censor_diagonal": a.censor_diagonal }))?;
    let gm = GoogleMatrix::new(&g, a.pagerank.alpha, a.direction)?;
    let mut r = spectral::reduced_google_matrix(&gm, &subset, opts)?;
    r.date = g.date;
    if a.censor_diagonal {
        r = spectral::censor_diagonal(&r)?;
    }
    run.write(&a.out, |buf| spectral::write_labeled_matrix(&r.labels, &r.gr, buf))?;
    Ok(())
}

fn diff_cmd(run: &mut Run, a: &DiffArgs) -> Result<()> {
    let (l1, m1) = spectral::read_labeled_matrix(run.read(&a.reduced[0])?.as_slice())
        .with_context(|| format!("cannot load {}", a.reduced[0].display()))?;
    let (l2, m2) = spectral::read_labeled_matrix(run.read(&a.reduced[1])?.as_slice())
        .with_context(|| format!("cannot load {}", a.reduced[1].display()))?;
    if l1 != l2 {
        bail!(
            "subset mismatch: {} and {} list different nodes or orders",
            a.reduced[0].display(),
            a.reduced[1].display()
        );
    }
    let cap = a.cap.as_ref().map(|c| (c[0], c[1]));
    if let Some((lo, hi)) = cap {
        if !(lo <= hi) {
            bail!("--cap needs LO <= HI");
        }
    }
    run.params(json!({ "cap": cap }))?;
    let change = spectral::ChangeMatrix {
        delta: spectral::relative_change_dense(&m1, &m2)?,
        labels: l1,
        dates: None,
        cap,
    };
    run.write(&a.out, |buf| change.write_csv(buf))?;
    Ok(())
}

fn rule(plurality: bool) -> MajorityRule {
    if plurality {
        MajorityRule::Plurality
    } else {
        MajorityRule::Strict
    }
}

fn classify_cmd(run: &mut Run, a: &ClassifyArgs) -> Result<()> {
    let g = load_graph(run, &a.graph)?;
    run.params(json!({ "rule": rule(a.plurality), "countries": a.countries }))?;
    let assign = analysis::classify_countries_with(&g, rule(a.plurality));
    run.emit(a.out.as_deref(), |buf| assign.write_csv(buf))?;
    if let Some(path) = &a.asorg {
        let mut truth = GroundTruth::default();
        truth.read_asorg(&run.read_string(path)?);
        let countries: Vec<String> = a.countries.iter().map(|c| c.trim().to_ascii_uppercase()).collect();
        let report = analysis::classification_metrics(&assign, &truth, &countries);
        run.emit(a.metrics_out.as_deref(), |buf| report.write_csv(buf))?;
    }
    Ok(())
}

fn write_as_table(g: &CGraph, table: &spectral::RankTable, buf: &mut Vec<u8>) -> crate::Result<()> {
    csv_rows(
        buf,
        &["rank", "asn", "name", "info_ratio", "value"],
        table.rows.iter().map(|r| {
            vec![
                r.rank.to_string(),
                r.id.to_string(),
                g.node_name(r.node).to_string(),
                g.class_of(r.node).code().to_string(),
                r.value.to_string(),
            ]
        }),
    )
}

fn hypergiants_cmd(run: &mut Run, a: &HypergiantArgs) -> Result<()> {
    let g = load_graph(run, &a.graph)?;
    let opts = a.pagerank.options();
    run.params(json!({ "k": a.k, "pagerank": opts }))?;
    let t = analysis::hypergiants(&g, a.k, opts)?;
    run.emit(a.out.as_deref(), |buf| write_as_table(&g, &t, buf))
}

fn receivers_cmd(run: &mut Run, a: &ReceiverArgs) -> Result<()> {
    let g = load_graph(run, &a.graph)?;
    let exclude: BTreeSet<u32> = match &a.exclude {
        Some(p) => parse_node_list(&run.read_string(p)?)?
            .into_iter()
            .filter_map(|id| match id {
                NodeId::As(n) => Some(n),
                NodeId::Ixp(_) => None,
            })
            .collect(),
        None => BTreeSet::new(),
    };
    let pr_opts = a.pagerank.options();
    let hyper: BTreeSet<u32> = if a.hypergiants == 0 {
        BTreeSet::new()
    } else {
        analysis::hypergiants(&g, a.hypergiants.min(g.n_as()), pr_opts)?
            .ids()
            .into_iter()
            .filter_map(|id| match id {
                NodeId::As(n) => Some(n),
                NodeId::Ixp(_) => None,
            })
            .collect()
    };
    let opts = ReceiverOptions {
        countries: a.countries.iter().map(|c| c.trim().to_ascii_uppercase()).collect(),
        business_types: analysis::parse_business_types(&a.types),
        hypergiants: hyper,
        exclude,
        top: a.top,
    };
    run.params(json!({ "receivers": opts, "rule": rule(a.plurality), "pagerank": pr_opts }))?;
    let assign = analysis::classify_countries_with(&g, rule(a.plurality));
    let pr = spectral::graph_pagerank(&g, Direction::Forward, pr_opts)?;
    let receivers = analysis::traffic_receivers(&g, &pr, &assign, &opts);
    run.emit(a.out.as_deref(), |buf| {
        analysis::write_receivers_csv(&receivers, &g, buf)
    })?;
    if !a.apnic.is_empty() {
        let mut truth = GroundTruth::default();
        for p in &a.apnic {
            truth.read_apnic(&run.read_string(p)?);
        }
        let cov = analysis::eums_coverage(&receivers, &truth);
        run.emit(a.eums_out.as_deref(), |buf| {
            csv_rows(
                buf,
                &["country", "eums", "listed", "known"],
                cov.iter().map(|c| {
                    vec![
                        c.country.clone(),
                        c.eums.to_string(),
                        c.members.len().to_string(),
                        c.members.iter().filter(|m| m.1.is_some()).count().to_string(),
                    ]
                }),
            )
        })?;
    }
    Ok(())
}

fn sweep_cmd(run: &mut Run, a: &SweepArgs) -> Result<()> {
    let g = match (&a.graph, &a.snapshot) {
        (Some(p), _) => load_graph(run, p)?,
        (None, Some(p)) => CGraph::build(&load_snapshot(run, p, a.date)?, BetaParams::default())?,
        (None, None) => bail!("sweep needs --graph or --snapshot"),
    };
    let opts = SweepOptions {
        grid_h: analysis::parse_grid(&a.grid_h)?,
        grid_m: analysis::parse_grid(&a.grid_m)?,
        probes: a.probes.clone(),
        scope: if a.ases_only {
            RankScope::AsesOnly
        } else {
            RankScope::AllNodes
        },
        pagerank: a.pagerank.options(),
    };
    run.params(&opts)?;
    let report = analysis::beta_stability_sweep(&g, &opts)?;
    run.emit(a.out.as_deref(), |buf| report.write_csv(buf))
}

fn cluster_cmd(run: &mut Run, a: &ClusterArgs) -> Result<()> {
    let g = load_graph(run, &a.graph)?;
    let opts = LouvainOptions {
        seed: a.seed,
        max_passes: a.max_passes,
        restarts: a.restarts,
    };
    run.params(opts)?;
    let p = clustering::louvain_bipartite(&clustering::symmetrize(&g), opts);
    run.write(&a.out, |buf| p.write_csv(&g.node_ids(), buf))?;
    let profile = clustering::cluster_profile(&p, &g)?;
    run.emit(a.profile_out.as_deref(), |buf| {
        clustering::write_profile_csv(&profile, buf)
    })?;
    eprintln!("communities {} modularity {}", p.n_communities(), p.modularity);
    Ok(())
}

fn export_cmd(run: &mut Run, a: &ExportArgs) -> Result<()> {
    let g = load_graph(run, &a.graph)?;
    run.params(json!({ "format": format!("{:?}", a.format).to_lowercase(), "with_countries": a.with_countries }))?;
    match a.format {
        ExportFormat::Gexf => {
            let countries = a.with_countries.then(|| analysis::classify_countries(&g).countries);
            run.write(&a.out, |buf| cgraph::write_gexf(&g, countries.as_ref(), buf))?
        }
        ExportFormat::Edgelist => run.write(&a.out, |buf| cgraph::write_edgelist(&g, buf))?,
        ExportFormat::Csv => run.write(&a.out, |buf| cgraph::write_weight_csv(&g, buf))?,
    };
    Ok(())
}

fn timeseries_cmd(run: &mut Run, a: &TimeseriesArgs) -> Result<()> {
    let mut snapshots = Vec::new();
    for p in &a.snapshots {
        snapshots.push(load_snapshot(run, p, None)?);
    }
    snapshots.sort_by_key(|s| s.date);
    if snapshots.windows(2).any(|w| w[0].date == w[1].date) {
        bail!("two dumps share one date");
    }
    run.params(json!({ "breakpoint": a.breakpoint }))?;
    let series = ingest::capacity_timeseries(&snapshots);
    run.emit(a.out.as_deref(), |buf| {
        csv_rows(
            buf,
            &["date", "capacity_gbps"],
            series
                .iter()
                .map(|(d, c)| vec![d.to_string(), (c / 1000.0).to_string()]),
        )
    })?;
    if a.breakpoint {
        let gbit: Vec<(NaiveDate, f64)> = series.iter().map(|(d, c)| (*d, c / 1000.0)).collect();
        let fit = cgraph::breakpoint_fit_dated(&gbit)?;
        run.emit(a.fit_out.as_deref(), |buf| {
            csv_rows(
                buf,
                &[
                    "breakpoint",
                    "slope_before_gbps_per_day",
                    "slope_after_gbps_per_day",
                    "sse",
                ],
                [vec![
                    fit.breakpoint.to_string(),
                    fit.slope_before.to_string(),
                    fit.slope_after.to_string(),
                    fit.sse.to_string(),
                ]],
            )
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_lists() {
        let ids = parse_node_list("AS15169, IX3\n# comment\n32934 # facebook\n").unwrap();
        assert_eq!(ids, vec![NodeId::As(15169), NodeId::Ixp(3), NodeId::As(32934)]);
        assert!(parse_node_list("ASX").is_err());
    }

    #[test]
    fn unknown_flag_is_one_line() {
        let e = run(["peergraph", "rank", "--bogus"]).unwrap_err().to_string();
        assert!(!e.contains('\n'));
        assert!(e.contains("--bogus"));
    }
}
