//! `stn`: experiments for joint routing and computation offloading.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stn_core::baselines::{solve_dfs, solve_full_enumeration, solve_local_only};
use stn_core::colgen::{audit_optimality, run_column_generation, ColGenOptions, SeedPool};
use stn_core::experiments::{
    default_demand_means, demand_sweep, enumeration_counts, hop_sweep, table2, DEFAULT_SWEEP_SEEDS,
};
use stn_core::lp::LpOptions;
use stn_core::report::{write_csv, CsvRow, ResultDocument, TraceRow};
use stn_core::routing::DEFAULT_ENUMERATION_CEILING;
use stn_core::scenario::{load_scenario, ScenarioDocument};
use stn_core::{HopLimits, Scenario};

/// Hop limit of the built-in reference scenario.
const REFERENCE_HOPS: usize = 5;

#[derive(Parser)]
#[command(
    name = "stn",
    version,
    about = "Column generation for routing and offloading in satellite-terrestrial networks"
)]
struct Cli {
    /// Scenario document (JSON). Defaults to the built-in 6x5 reference instance.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Demand seed (first seed of a sweep).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Inter-satellite hop limit, overriding the scenario.
    #[arg(long, global = true)]
    hs: Option<usize>,
    /// Ground hop limit (SGL included), overriding the scenario.
    #[arg(long, global = true)]
    hg: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Refuse to enumerate more routes than this.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CEILING)]
    enumeration_ceiling: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// LP over every route within the hop limits.
    Full,
    /// Greedy depth-first offloading.
    Dfs,
    /// Local computing only.
    Local,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the scenario's topology (JSON document, or CSV edge list).
    Topology,
    /// Count hop-bounded routes, one row per hop limit.
    Enumerate {
        /// Rows for Hs = Hg = 1..=max-hops unless --hs/--hg pick a single row.
        #[arg(long, default_value_t = 5)]
        max_hops: usize,
    },
    /// Solve by column generation.
    Solve {
        /// Start from every 1-hop route instead of an empty pool.
        #[arg(long)]
        seed_one_hop: bool,
        /// Re-solve every master from scratch.
        #[arg(long)]
        cold: bool,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
    },
    /// Solve with a reference method.
    Baseline {
        #[arg(long, value_enum, default_value_t = Method::Dfs)]
        method: Method,
    },
    /// Enumerated versus activated routes for Hs = Hg = 1..=max-hops.
    Table2 {
        #[arg(long, default_value_t = 5)]
        max_hops: usize,
    },
    /// Objective and per-layer volumes for Hs = Hg = 0..=max-hops, averaged over seeds.
    HopSweep {
        #[arg(long, default_value_t = 5)]
        max_hops: usize,
        #[arg(long, default_value_t = DEFAULT_SWEEP_SEEDS)]
        seeds: u64,
    },
    /// Column generation, DFS and local-only objectives against the mean demand.
    DemandSweep {
        /// Comma-separated means in the scenario's data unit (default 5,10,..,100).
        #[arg(long, value_delimiter = ',')]
        means: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_SWEEP_SEEDS)]
        seeds: u64,
    },
    /// Solve, then check the final duals against every route within the hop limits.
    Audit {
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

struct Instance {
    doc: ScenarioDocument,
    base_dir: Option<PathBuf>,
}

impl Cli {
    fn instance(&self) -> Result<Instance> {
        let (mut doc, base_dir) = match &self.scenario {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let doc: ScenarioDocument = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                (doc, path.parent().map(Path::to_path_buf))
            }
            None => (ScenarioDocument::reference(self.seed, REFERENCE_HOPS), None),
        };
        doc.set_seed(self.seed);
        let hops = HopLimits {
            intersat: self.hs.unwrap_or(doc.hops[0]),
            ground: self.hg.unwrap_or(doc.hops[1]),
        };
        doc.set_hops(hops);
        Ok(Instance { doc, base_dir })
    }

    /// Hop limits for commands that iterate `H = lo..=max`, or the single
    /// pair given by --hs/--hg.
    fn hop_range(&self, lo: usize, max: usize) -> Vec<HopLimits> {
        match (self.hs, self.hg) {
            (None, None) => (lo..=max).map(HopLimits::uniform).collect(),
            (hs, hg) => {
                let h = hs.or(hg).unwrap();
                vec![HopLimits {
                    intersat: hs.unwrap_or(h),
                    ground: hg.unwrap_or(h),
                }]
            }
        }
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

impl Instance {
    fn scenario(&self) -> Result<Scenario> {
        Ok(load_scenario(&self.doc, self.base_dir.as_deref())?)
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn emit_table<R: CsvRow>(out: &mut dyn Write, format: Format, rows: &[R]) -> Result<()> {
    match format {
        Format::Csv => write_csv(&mut *out, rows)?,
        Format::Json => emit_json(out, &rows)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct SummaryRow {
    method: String,
    hs: usize,
    hg: usize,
    objective: f64,
    local_volume: f64,
    intersat_volume: f64,
    ground_volume: f64,
}

impl CsvRow for SummaryRow {
    const SCHEMA: &'static str = "summary";
    const HEADER: &'static [&'static str] = &[
        "method",
        "hs",
        "hg",
        "objective",
        "local_volume",
        "intersat_volume",
        "ground_volume",
    ];
}

impl From<&ResultDocument> for SummaryRow {
    fn from(d: &ResultDocument) -> Self {
        SummaryRow {
            method: d.method.clone(),
            hs: d.hops[0],
            hg: d.hops[1],
            objective: d.objective,
            local_volume: d.volumes.local,
            intersat_volume: d.volumes.intersat,
            ground_volume: d.volumes.ground,
        }
    }
}

#[derive(Serialize)]
struct EdgeRow {
    a: u32,
    b: u32,
    kind: String,
    capacity: f64,
}

impl CsvRow for EdgeRow {
    const SCHEMA: &'static str = "edges";
    const HEADER: &'static [&'static str] = &["a", "b", "kind", "capacity"];
}

fn run(cli: &Cli) -> Result<bool> {
    let ctx = cli.instance()?;
    let ceiling = Some(cli.enumeration_ceiling);
    let mut out = cli.output()?;
    let out: &mut dyn Write = &mut out;
    let mut passed = true;

    match &cli.command {
        Command::Topology => {
            let s = ctx.scenario()?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(out, &s.topology().to_document())?,
                Format::Csv => {
                    let rows: Vec<EdgeRow> = s
                        .topology()
                        .edges()
                        .iter()
                        .map(|e| EdgeRow {
                            a: e.a.0,
                            b: e.b.0,
                            kind: format!("{:?}", e.kind).to_lowercase(),
                            capacity: e.capacity,
                        })
                        .collect();
                    write_csv(&mut *out, &rows)?;
                }
            }
        }
        Command::Enumerate { max_hops } => {
            let s = ctx.scenario()?;
            let rows = enumeration_counts(s.topology(), &cli.hop_range(1, *max_hops), ceiling)?;
            emit_table(out, cli.format.unwrap_or(Format::Csv), &rows)?;
        }
        Command::Solve {
            seed_one_hop,
            cold,
            max_iters,
        } => {
            let s = ctx.scenario()?;
            let opts = ColGenOptions {
                seed_pool: if *seed_one_hop {
                    SeedPool::OneHop
                } else {
                    SeedPool::Empty
                },
                warm_start: !cold,
                max_iters: *max_iters,
                ..ColGenOptions::default()
            };
            let r = run_column_generation(&s, &opts)?;
            let doc = ResultDocument::from_colgen(&s, &r);
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(out, &doc)?,
                Format::Csv => {
                    let rows: Vec<TraceRow> = r.trace.iter().map(TraceRow::from).collect();
                    write_csv(&mut *out, &rows)?;
                }
            }
            if !r.converged() {
                eprintln!(
                    "column generation stopped without converging ({:?})",
                    r.status
                );
                passed = false;
            }
        }
        Command::Baseline { method } => {
            let s = ctx.scenario()?;
            let doc = match method {
                Method::Full => ResultDocument::from_enumeration(
                    &s,
                    &solve_full_enumeration(&s, ceiling, &LpOptions::default())?,
                ),
                Method::Dfs => ResultDocument::from_heuristic("dfs", &s, &solve_dfs(&s)),
                Method::Local => {
                    ResultDocument::from_heuristic("local-only", &s, &solve_local_only(&s))
                }
            };
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(out, &doc)?,
                Format::Csv => write_csv(&mut *out, &[SummaryRow::from(&doc)])?,
            }
        }
        Command::Table2 { max_hops } => {
            let rows = table2(
                &ctx.doc,
                ctx.base_dir.as_deref(),
                &cli.hop_range(1, *max_hops),
                ceiling,
                &ColGenOptions::default(),
            )?;
            emit_table(out, cli.format.unwrap_or(Format::Csv), &rows)?;
        }
        Command::HopSweep { max_hops, seeds } => {
            let seeds = seed_list(cli.seed, *seeds)?;
            let rows = hop_sweep(
                &ctx.doc,
                ctx.base_dir.as_deref(),
                &cli.hop_range(0, *max_hops),
                &seeds,
                &ColGenOptions::default(),
            )?;
            emit_table(out, cli.format.unwrap_or(Format::Csv), &rows)?;
        }
        Command::DemandSweep { means, seeds } => {
            let seeds = seed_list(cli.seed, *seeds)?;
            let means = means.clone().unwrap_or_else(default_demand_means);
            let rows = demand_sweep(
                &ctx.doc,
                ctx.base_dir.as_deref(),
                &means,
                &seeds,
                &ColGenOptions::default(),
            )?;
            emit_table(out, cli.format.unwrap_or(Format::Csv), &rows)?;
        }
        Command::Audit { tol } => {
            let s = ctx.scenario()?;
            let r = run_column_generation(&s, &ColGenOptions::default())?;
            if !r.converged() {
                bail!(
                    "column generation stopped without converging ({:?})",
                    r.status
                );
            }
            let report = audit_optimality(&s, &r, *tol, ceiling, &LpOptions::default())?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(out, &report)?,
                Format::Csv => bail!("the audit report is only available as JSON"),
            }
            if let Some(why) = &report.skipped {
                eprintln!("audit skipped: {why}");
            } else if !report.passed() {
                eprintln!(
                    "audit found {} route and {} local dual violations",
                    report.violations.len(),
                    report.local_violations.len()
                );
                passed = false;
            }
        }
    }
    out.flush()?;
    Ok(passed)
}

fn seed_list(first: u64, count: u64) -> Result<Vec<u64>> {
    if count == 0 {
        bail!("--seeds must be at least 1");
    }
    Ok((first..first + count).collect())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
