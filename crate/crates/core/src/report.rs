//! Result documents (JSON) and versioned CSV tables.
//!
//! Every CSV starts with a `# schema=<name> version=<n>` comment line and a
//! header row, even when there are no data rows.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::{EnumeratedSolution, HeuristicSolution};
use crate::colgen::{ColGenResult, ColGenStatus, IterationRecord};
use crate::error::Result;
use crate::master::{Allocation, LayerVolumes};
use crate::routing::RouteKind;
use crate::scalar::Scalar;
use crate::scenario::Scenario;

/// A row type with a fixed, versioned CSV layout.
pub trait CsvRow: Serialize {
    const SCHEMA: &'static str;
    const VERSION: u32 = 1;
    const HEADER: &'static [&'static str];
}

pub fn write_csv<R: CsvRow, W: Write>(out: W, rows: &[R]) -> Result<()> {
    let mut out = out;
    writeln!(out, "# schema={} version={}", R::SCHEMA, R::VERSION)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(R::HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<R: CsvRow>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// `iter, n_columns, objective, n_violations_found` per column-generation iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub n_columns: usize,
    pub objective: f64,
    pub n_violations_found: usize,
}

impl CsvRow for TraceRow {
    const SCHEMA: &'static str = "trace";
    const HEADER: &'static [&'static str] =
        &["iter", "n_columns", "objective", "n_violations_found"];
}

impl<T: Scalar> From<&IterationRecord<T>> for TraceRow {
    fn from(r: &IterationRecord<T>) -> Self {
        TraceRow {
            iter: r.iter,
            n_columns: r.n_columns,
            objective: r.objective.as_f64(),
            n_violations_found: r.n_violations_found,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteFlow {
    pub route: String,
    pub kind: RouteKind,
    pub hops: usize,
    pub flow: f64,
}

/// Solution of any method in one comparable shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<ColGenStatus>,
    pub hops: [usize; 2],
    pub objective: f64,
    pub volumes: LayerVolumes<f64>,
    pub local: Vec<f64>,
    pub routes: Vec<RouteFlow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub activated_intersat: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub activated_ground: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerated: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceRow>,
}

/// Flows at or below this are left out of route listings.
pub const FLOW_REPORT_THRESHOLD: f64 = 1e-12;

fn base<T: Scalar>(
    method: &str,
    scenario: &Scenario<T>,
    objective: T,
    alloc: &Allocation<T>,
) -> ResultDocument {
    let v = alloc.layer_volumes();
    let hops = scenario.hops();
    ResultDocument {
        method: method.to_string(),
        status: None,
        hops: [hops.intersat, hops.ground],
        objective: objective.as_f64(),
        volumes: LayerVolumes {
            local: v.local.as_f64(),
            intersat: v.intersat.as_f64(),
            ground: v.ground.as_f64(),
        },
        local: alloc.local.iter().map(|x| x.as_f64()).collect(),
        routes: alloc
            .flows
            .iter()
            .filter(|(_, f)| f.as_f64() > FLOW_REPORT_THRESHOLD)
            .map(|(r, f)| RouteFlow {
                route: r.to_string(),
                kind: r.kind(),
                hops: r.hops(),
                flow: f.as_f64(),
            })
            .collect(),
        iterations: None,
        activated_intersat: None,
        activated_ground: None,
        enumerated: None,
        wall_time_s: None,
        trace: Vec::new(),
    }
}

impl ResultDocument {
    pub fn from_colgen<T: Scalar>(scenario: &Scenario<T>, r: &ColGenResult<T>) -> Self {
        let mut doc = base("colgen", scenario, r.objective, &r.allocation(T::zero()));
        doc.status = Some(r.status);
        doc.iterations = Some(r.iterations);
        doc.activated_intersat = Some(r.activated_intersat());
        doc.activated_ground = Some(r.activated_ground());
        doc.wall_time_s = Some(r.wall_time.as_secs_f64());
        doc.trace = r.trace.iter().map(TraceRow::from).collect();
        doc
    }

    pub fn from_enumeration<T: Scalar>(scenario: &Scenario<T>, s: &EnumeratedSolution<T>) -> Self {
        let mut doc = base(
            "full-enumeration",
            scenario,
            s.objective,
            &s.allocation(T::zero()),
        );
        doc.enumerated = Some(s.pool.len());
        doc
    }

    pub fn from_heuristic<T: Scalar>(
        method: &str,
        scenario: &Scenario<T>,
        s: &HeuristicSolution<T>,
    ) -> Self {
        base(method, scenario, s.objective, &s.allocation)
    }
}
