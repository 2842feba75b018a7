//! Experiment drivers: route counts, scale reduction, hop and demand sweeps.
//!
//! Sweeps take a scenario document as a template and vary its hop limits,
//! demand seed or demand mean. Points run in parallel; rows come back in
//! input order.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{solve_dfs, solve_local_only};
use crate::colgen::{run_column_generation, ColGenOptions};
use crate::constellation::Topology;
use crate::error::{Error, Result};
use crate::report::CsvRow;
use crate::routing::enumerate_routes;
use crate::scenario::{load_scenario, DemandSpec, HopLimits, Scenario, ScenarioDocument};

/// Seeds used by sweeps unless told otherwise.
pub const DEFAULT_SWEEP_SEEDS: u64 = 20;

/// Demand means of the default demand sweep, in the template's data unit.
pub fn default_demand_means() -> Vec<f64> {
    (1..=20).map(|k| 5.0 * k as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationRow {
    pub hs: usize,
    pub hg: usize,
    pub n_intersat: usize,
    pub n_ground: usize,
    pub total: usize,
}

impl CsvRow for EnumerationRow {
    const SCHEMA: &'static str = "enumerate";
    const HEADER: &'static [&'static str] = &["hs", "hg", "n_intersat", "n_ground", "total"];
}

pub fn enumeration_counts(
    topology: &Topology<f64>,
    limits: &[HopLimits],
    ceiling: Option<usize>,
) -> Result<Vec<EnumerationRow>> {
    limits
        .iter()
        .map(|&h| {
            let set = enumerate_routes(topology, h, ceiling)?;
            Ok(EnumerationRow {
                hs: h.intersat,
                hg: h.ground,
                n_intersat: set.intersat.len(),
                n_ground: set.ground.len(),
                total: set.total(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub hs: usize,
    pub hg: usize,
    pub enumerated: usize,
    pub activated: usize,
    pub activated_intersat: usize,
    pub activated_ground: usize,
    /// `100 · (1 − activated / enumerated)`, 0 when nothing is enumerated.
    pub reduction_pct: f64,
    pub objective: f64,
    pub iterations: usize,
}

impl CsvRow for Table2Row {
    const SCHEMA: &'static str = "table2";
    const HEADER: &'static [&'static str] = &[
        "hs",
        "hg",
        "enumerated",
        "activated",
        "activated_intersat",
        "activated_ground",
        "reduction_pct",
        "objective",
        "iterations",
    ];
}

fn load(doc: &ScenarioDocument, base_dir: Option<&Path>) -> Result<Scenario<f64>> {
    load_scenario(doc, base_dir)
}

/// Enumerated versus activated route counts for each hop limit.
pub fn table2(
    template: &ScenarioDocument,
    base_dir: Option<&Path>,
    limits: &[HopLimits],
    ceiling: Option<usize>,
    options: &ColGenOptions<f64>,
) -> Result<Vec<Table2Row>> {
    limits
        .par_iter()
        .map(|&h| {
            let mut doc = template.clone();
            doc.set_hops(h);
            let s = load(&doc, base_dir)?;
            let enumerated = enumerate_routes(s.topology(), h, ceiling)?.total();
            let r = run_column_generation(&s, options)?;
            let activated = r.activated();
            let reduction_pct = if enumerated == 0 {
                0.0
            } else {
                100.0 * (1.0 - activated as f64 / enumerated as f64)
            };
            Ok(Table2Row {
                hs: h.intersat,
                hg: h.ground,
                enumerated,
                activated,
                activated_intersat: r.activated_intersat(),
                activated_ground: r.activated_ground(),
                reduction_pct,
                objective: r.objective,
                iterations: r.iterations,
            })
        })
        .collect()
}

/// One solved instance of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub seed: u64,
    pub colgen_objective: f64,
    pub dfs_objective: f64,
    pub local_only_objective: f64,
    pub local_volume: f64,
    pub intersat_volume: f64,
    pub ground_volume: f64,
    pub activated: usize,
    pub converged: bool,
}

fn solve_point(
    doc: &ScenarioDocument,
    base_dir: Option<&Path>,
    seed: u64,
    options: &ColGenOptions<f64>,
) -> Result<SweepPoint> {
    let mut doc = doc.clone();
    doc.set_seed(seed);
    let s = load(&doc, base_dir)?;
    let r = run_column_generation(&s, options)?;
    let v = r.allocation(0.0).layer_volumes();
    Ok(SweepPoint {
        seed,
        colgen_objective: r.objective,
        dfs_objective: solve_dfs(&s).objective,
        local_only_objective: solve_local_only(&s).objective,
        local_volume: v.local,
        intersat_volume: v.intersat,
        ground_volume: v.ground,
        activated: r.activated(),
        converged: r.converged(),
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Per-hop-limit means over seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopSweepRow {
    pub hs: usize,
    pub hg: usize,
    pub seeds: usize,
    pub objective: f64,
    pub local_volume: f64,
    pub intersat_volume: f64,
    pub ground_volume: f64,
    pub total_volume: f64,
    pub dfs_objective: f64,
    pub local_only_objective: f64,
    pub activated: f64,
    pub all_converged: bool,
}

impl CsvRow for HopSweepRow {
    const SCHEMA: &'static str = "hop-sweep";
    const HEADER: &'static [&'static str] = &[
        "hs",
        "hg",
        "seeds",
        "objective",
        "local_volume",
        "intersat_volume",
        "ground_volume",
        "total_volume",
        "dfs_objective",
        "local_only_objective",
        "activated",
        "all_converged",
    ];
}

/// Per-demand-mean means over seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandSweepRow {
    pub mean_demand: f64,
    pub seeds: usize,
    pub colgen_objective: f64,
    pub dfs_objective: f64,
    pub local_only_objective: f64,
    pub total_volume: f64,
    pub all_converged: bool,
}

impl CsvRow for DemandSweepRow {
    const SCHEMA: &'static str = "demand-sweep";
    const HEADER: &'static [&'static str] = &[
        "mean_demand",
        "seeds",
        "colgen_objective",
        "dfs_objective",
        "local_only_objective",
        "total_volume",
        "all_converged",
    ];
}

fn check_seeds(seeds: &[u64]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter(
            "a sweep needs at least one seed".into(),
        ));
    }
    Ok(())
}

/// Every (hop limit, seed) instance, grouped by hop limit.
pub fn hop_sweep_points(
    template: &ScenarioDocument,
    base_dir: Option<&Path>,
    limits: &[HopLimits],
    seeds: &[u64],
    options: &ColGenOptions<f64>,
) -> Result<Vec<Vec<SweepPoint>>> {
    check_seeds(seeds)?;
    let jobs: Vec<(usize, u64)> = (0..limits.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let points: Vec<SweepPoint> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let mut doc = template.clone();
            doc.set_hops(limits[i]);
            solve_point(&doc, base_dir, seed, options)
        })
        .collect::<Result<_>>()?;
    Ok(points
        .chunks(seeds.len())
        .map(<[SweepPoint]>::to_vec)
        .collect())
}

pub fn hop_sweep(
    template: &ScenarioDocument,
    base_dir: Option<&Path>,
    limits: &[HopLimits],
    seeds: &[u64],
    options: &ColGenOptions<f64>,
) -> Result<Vec<HopSweepRow>> {
    let groups = hop_sweep_points(template, base_dir, limits, seeds, options)?;
    Ok(limits
        .iter()
        .zip(groups)
        .map(|(h, pts)| {
            let m = |f: fn(&SweepPoint) -> f64| mean(pts.iter().map(f));
            HopSweepRow {
                hs: h.intersat,
                hg: h.ground,
                seeds: pts.len(),
                objective: m(|p| p.colgen_objective),
                local_volume: m(|p| p.local_volume),
                intersat_volume: m(|p| p.intersat_volume),
                ground_volume: m(|p| p.ground_volume),
                total_volume: m(|p| p.local_volume + p.intersat_volume + p.ground_volume),
                dfs_objective: m(|p| p.dfs_objective),
                local_only_objective: m(|p| p.local_only_objective),
                activated: m(|p| p.activated as f64),
                all_converged: pts.iter().all(|p| p.converged),
            }
        })
        .collect())
}

/// Every (mean, seed) instance, grouped by mean. The template must draw its
/// demands from a model.
pub fn demand_sweep_points(
    template: &ScenarioDocument,
    base_dir: Option<&Path>,
    means: &[f64],
    seeds: &[u64],
    options: &ColGenOptions<f64>,
) -> Result<Vec<Vec<SweepPoint>>> {
    check_seeds(seeds)?;
    if matches!(template.demands, DemandSpec::Explicit(_)) {
        return Err(Error::InvalidParameter(
            "a demand sweep needs demands drawn from a model, not an explicit list".into(),
        ));
    }
    let jobs: Vec<(usize, u64)> = (0..means.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let points: Vec<SweepPoint> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let mut doc = template.clone();
            doc.set_demand_mean(means[i]);
            solve_point(&doc, base_dir, seed, options)
        })
        .collect::<Result<_>>()?;
    Ok(points
        .chunks(seeds.len())
        .map(<[SweepPoint]>::to_vec)
        .collect())
}

pub fn demand_sweep(
    template: &ScenarioDocument,
    base_dir: Option<&Path>,
    means: &[f64],
    seeds: &[u64],
    options: &ColGenOptions<f64>,
) -> Result<Vec<DemandSweepRow>> {
    let groups = demand_sweep_points(template, base_dir, means, seeds, options)?;
    Ok(means
        .iter()
        .zip(groups)
        .map(|(&mean_demand, pts)| {
            let m = |f: fn(&SweepPoint) -> f64| mean(pts.iter().map(f));
            DemandSweepRow {
                mean_demand,
                seeds: pts.len(),
                colgen_objective: m(|p| p.colgen_objective),
                dfs_objective: m(|p| p.dfs_objective),
                local_only_objective: m(|p| p.local_only_objective),
                total_volume: m(|p| p.local_volume + p.intersat_volume + p.ground_volume),
                all_converged: pts.iter().all(|p| p.converged),
            }
        })
        .collect())
}
