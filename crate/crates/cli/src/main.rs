//! `kanon` — anonymity measures for undirected graphs: d-k-anonymity,
//! anonymity-cascade, twin-node analysis, and model sweeps.

mod input;
mod reports;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kanon::canonical::{CertificateCache, CertifyOptions};
use kanon::cascade::{cascade, CascadeBudget};
use kanon::equivalence::{partition_with, report as anonymity_report};
use kanon::sweep::{rows_to_csv, sweep, SweepGrid};
use kanon::twins::{
    find_twins, twin_cascade, twin_unique_fraction, TwinSets, TwinUniqueEntry, TwinUniqueReport,
};

use input::ResolvedInput;
use reports::{
    CascadeResults, DkEntry, DkResults, GraphInfo, Meta, Report, StatsResults, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "kanon",
    version,
    about = "Node anonymity measures for undirected graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputOpts {
    /// Edge-list file: two whitespace-separated labels per line, extra
    /// columns ignored, '#'/'%' comments.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inline model spec: er:n=1000,deg=5 | ba:n=1000,m=5 | ws:n=1000,k=6,p=0.5
    #[arg(long)]
    model: Option<String>,
    /// Restrict the analysis to the largest connected component.
    #[arg(long)]
    giant: bool,
    /// Seed for --model generation (a seed= inside the spec wins).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutputOpts {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cap the global worker pool.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TwinMode {
    /// No twin processing.
    Off,
    /// Detect twins, use them to speed up partitioning, report the sets.
    Report,
    /// Additionally report twin-unique fractions (and the twin cascade).
    TwinUnique,
}

impl TwinMode {
    fn name(self) -> &'static str {
        match self {
            TwinMode::Off => "off",
            TwinMode::Report => "report",
            TwinMode::TwinUnique => "twin-unique",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Graph summary: node/edge counts, degree statistics, twin fraction.
    Stats {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// d-k-anonymity: equivalence partition and k-anonymity fractions per d.
    Dk {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        out: OutputOpts,
        /// Neighborhood distances, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        d: Vec<u32>,
        /// Report fractions for k = 1..=kmax.
        #[arg(long, default_value_t = 5)]
        kmax: u32,
        #[arg(long, value_enum, default_value_t = TwinMode::Off)]
        twins: TwinMode,
    },
    /// Anonymity-cascade from the unique ego networks.
    Cascade {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        out: OutputOpts,
        /// Level budget: a number or "exhaust".
        #[arg(long, default_value = "exhaust")]
        levels: String,
        #[arg(long, value_enum, default_value_t = TwinMode::Off)]
        twins: TwinMode,
    },
    /// Twin-node sets and their size distribution.
    Twins {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Measure sweep over a model grid described by a JSON config file.
    Sweep {
        /// Grid config: families, n_values, degree_values, d_values,
        /// cascade_budgets, twin_variants, repetitions, seed, rewiring_p.
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        out: OutputOpts,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        let payload = json!({ "error": format!("{err:#}") });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats { input, out } => {
            init_threads(out.threads)?;
            let resolved = input.resolve()?;
            let text = stats_report(&input, &resolved)?;
            write_output(&out, text)
        }
        Command::Dk {
            input,
            out,
            d,
            kmax,
            twins,
        } => {
            init_threads(out.threads)?;
            let resolved = input.resolve()?;
            let text = dk_report(&input, &out, &resolved, &d, kmax, twins)?;
            write_output(&out, text)
        }
        Command::Cascade {
            input,
            out,
            levels,
            twins,
        } => {
            init_threads(out.threads)?;
            let budget = parse_budget(&levels)?;
            let resolved = input.resolve()?;
            let text = cascade_report(&input, &out, &resolved, &levels, budget, twins)?;
            write_output(&out, text)
        }
        Command::Twins { input, out } => {
            init_threads(out.threads)?;
            let resolved = input.resolve()?;
            let start = Instant::now();
            let twins = find_twins(&resolved.graph);
            let mut timing = BTreeMap::new();
            timing.insert("twin_seconds".to_string(), start.elapsed().as_secs_f64());
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: "twins",
                config: input.echo(json!({})),
                graph: resolved.graph_info(),
                results: twins.summary(),
                meta: Meta::new(timing),
            };
            write_output(&out, report.to_json())
        }
        Command::Sweep { grid, out } => {
            init_threads(out.threads)?;
            let config = fs::read_to_string(&grid)
                .with_context(|| format!("cannot read grid config {}", grid.display()))?;
            let grid_config: SweepGrid =
                serde_json::from_str(&config).context("invalid sweep grid config")?;
            let rows = sweep(&grid_config);
            let text = match out.format {
                Format::Csv => rows_to_csv(&rows),
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": "sweep",
                        "config": grid_config,
                        "rows": rows,
                    }))?;
                    s.push('\n');
                    s
                }
            };
            write_output(&out, text)
        }
    }
}

impl InputOpts {
    fn resolve(&self) -> Result<ResolvedInput> {
        input::resolve(self.input.as_deref(), self.model.as_deref(), self.seed, self.giant)
    }

    /// Effective-config echo: input flags plus command-specific fields.
    fn echo(&self, mut extra: serde_json::Value) -> serde_json::Value {
        let base = json!({
            "input": self.input.as_ref().map(|p| p.display().to_string()),
            "model": self.model,
            "giant": self.giant,
            "seed": self.seed,
        });
        if let (Some(obj), Some(extra_obj)) = (base.as_object(), extra.as_object_mut()) {
            let mut merged = obj.clone();
            merged.append(extra_obj);
            return serde_json::Value::Object(merged);
        }
        base
    }
}

impl ResolvedInput {
    fn graph_info(&self) -> GraphInfo {
        GraphInfo {
            nodes: self.graph.node_count() as u64,
            edges: self.graph.edge_count() as u64,
            source: self.source.clone(),
            load_report: self.report.clone(),
            giant_dropped: self.giant_dropped,
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("worker pool already initialized")?;
    }
    Ok(())
}

fn parse_budget(text: &str) -> Result<CascadeBudget> {
    if text.eq_ignore_ascii_case("exhaust") {
        return Ok(CascadeBudget::Exhaust);
    }
    let levels: u32 = text
        .parse()
        .with_context(|| format!("--levels expects a number or 'exhaust', got '{text}'"))?;
    Ok(CascadeBudget::Levels(levels))
}

fn stats_report(opts: &InputOpts, resolved: &ResolvedInput) -> Result<String> {
    let g = &resolved.graph;
    let start = Instant::now();
    let twins = find_twins(g);
    let twin_seconds = start.elapsed().as_secs_f64();
    let degrees: Vec<usize> = g.nodes().map(|v| g.degree(v)).collect();
    let results = StatsResults {
        nodes: g.node_count() as u64,
        edges: g.edge_count() as u64,
        degree_min: degrees.iter().copied().min().unwrap_or(0) as u64,
        degree_mean: 2.0 * g.edge_count() as f64 / g.node_count() as f64,
        degree_max: degrees.iter().copied().max().unwrap_or(0) as u64,
        twin_fraction: twins.twin_fraction,
    };
    let mut timing = BTreeMap::new();
    timing.insert("twin_seconds".to_string(), twin_seconds);
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "stats",
        config: opts.echo(json!({})),
        graph: resolved.graph_info(),
        results,
        meta: Meta::new(timing),
    };
    Ok(report.to_json())
}

fn compute_twins(g: &kanon::Graph, mode: TwinMode) -> (Option<TwinSets>, f64) {
    if mode == TwinMode::Off {
        return (None, 0.0);
    }
    let start = Instant::now();
    let t = find_twins(g);
    (Some(t), start.elapsed().as_secs_f64())
}

fn dk_report(
    opts: &InputOpts,
    out: &OutputOpts,
    resolved: &ResolvedInput,
    ds: &[u32],
    kmax: u32,
    mode: TwinMode,
) -> Result<String> {
    if ds.is_empty() {
        bail!("--d requires at least one distance");
    }
    let g = &resolved.graph;
    let (twins, twin_seconds) = compute_twins(g, mode);
    let cache = CertificateCache::new();
    let certify = CertifyOptions::default();

    let mut timing = BTreeMap::new();
    if mode != TwinMode::Off {
        timing.insert("twin_seconds".to_string(), twin_seconds);
    }
    let mut per_d = Vec::new();
    let mut twin_entries = Vec::new();
    for &d in ds {
        let start = Instant::now();
        let p = partition_with(g, d, &cache, &certify, twins.as_ref());
        timing.insert(format!("d{d}_seconds"), start.elapsed().as_secs_f64());
        let report = anonymity_report(&p, kmax);
        let twin_unique = match (&twins, mode) {
            (Some(t), TwinMode::TwinUnique) => Some(twin_unique_fraction(&p, t)),
            _ => None,
        };
        if let Some(tu) = twin_unique {
            twin_entries.push(TwinUniqueEntry {
                measure: format!("d={d}"),
                plain: report.uniqueness,
                twin_unique: tu,
            });
        }
        per_d.push(DkEntry {
            report,
            twin_unique_fraction: twin_unique,
        });
    }

    if out.format == Format::Csv {
        return Ok(reports::dk_csv(&per_d));
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "dk",
        config: opts.echo(json!({
            "d": ds,
            "kmax": kmax,
            "twins": mode.name(),
        })),
        graph: resolved.graph_info(),
        results: DkResults {
            per_d,
            twins: twins.map(|t| t.summary()),
            twin_unique_report: if twin_entries.is_empty() {
                None
            } else {
                Some(TwinUniqueReport {
                    entries: twin_entries,
                })
            },
        },
        meta: Meta::new(timing),
    };
    Ok(report.to_json())
}

fn cascade_report(
    opts: &InputOpts,
    out: &OutputOpts,
    resolved: &ResolvedInput,
    levels_text: &str,
    budget: CascadeBudget,
    mode: TwinMode,
) -> Result<String> {
    let g = &resolved.graph;
    let (twins, twin_seconds) = compute_twins(g, mode);
    let cache = CertificateCache::new();

    let mut timing = BTreeMap::new();
    if mode != TwinMode::Off {
        timing.insert("twin_seconds".to_string(), twin_seconds);
    }
    let start = Instant::now();
    let p1 = partition_with(g, 1, &cache, &CertifyOptions::default(), twins.as_ref());
    timing.insert("d1_seconds".to_string(), start.elapsed().as_secs_f64());

    let start = Instant::now();
    let plain = cascade(g, &p1, budget);
    timing.insert("cascade_seconds".to_string(), start.elapsed().as_secs_f64());

    let twin_result = match (&twins, mode) {
        (Some(t), TwinMode::TwinUnique) => {
            let start = Instant::now();
            let r = twin_cascade(g, &p1, t, budget);
            timing.insert(
                "twin_cascade_seconds".to_string(),
                start.elapsed().as_secs_f64(),
            );
            Some(r)
        }
        _ => None,
    };

    if out.format == Format::Csv {
        // per-node rows: node label and first identification level
        let mut w = csv::Writer::from_writer(Vec::new());
        let twin_header = twin_result.is_some();
        if twin_header {
            w.write_record(["node", "label", "level", "twin_level"])?;
        } else {
            w.write_record(["node", "label", "level"])?;
        }
        for v in g.nodes() {
            let level = plain
                .level_of(v)
                .map(|l| l.to_string())
                .unwrap_or_default();
            let label = &resolved.labels[v.index()];
            if let Some(t) = &twin_result {
                let tl = t.level_of(v).map(|l| l.to_string()).unwrap_or_default();
                w.write_record([&v.to_string(), label, &level, &tl])?;
            } else {
                w.write_record([&v.to_string(), label, &level])?;
            }
        }
        return Ok(String::from_utf8(w.into_inner()?)?);
    }

    let twin_unique_report = twin_result.as_ref().map(|t| {
        let n = g.node_count() as f64;
        let final_measure = match budget {
            CascadeBudget::Exhaust => "c_exhaust".to_string(),
            CascadeBudget::Levels(l) => format!("c{l}"),
        };
        TwinUniqueReport {
            entries: vec![
                TwinUniqueEntry {
                    measure: "c1".to_string(),
                    plain: plain.identified_within(1) as f64 / n,
                    twin_unique: t.identified_within(1) as f64 / n,
                },
                TwinUniqueEntry {
                    measure: final_measure,
                    plain: plain.uniqueness_final(),
                    twin_unique: t.uniqueness_final(),
                },
            ],
        }
    });
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "cascade",
        config: opts.echo(json!({
            "levels": levels_text,
            "twins": mode.name(),
        })),
        graph: resolved.graph_info(),
        results: CascadeResults {
            summary: plain.summary(),
            twin: twin_result.map(|r| r.summary()),
            twins: twins.map(|t| t.summary()),
            twin_unique_report,
        },
        meta: Meta::new(timing),
    };
    Ok(report.to_json())
}

fn write_output(out: &OutputOpts, text: String) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write output to {}", path.display()))?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
