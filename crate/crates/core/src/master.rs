//! Restricted master problem over a growing pool of routes.
//!
//! Variable layout: `x^l_i` for every satellite first (satellite `i` at
//! position `i - 1`), then one flow per pooled route in insertion order.
//! Row layout: ISL capacity rows, SGL rows, one compute row and one data row
//! per satellite. Rows never change during a run; only columns are appended.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::constellation::{DuplexMode, LinkKind, NodeId, Topology};
use crate::error::{Error, Result};
use crate::lp::{self, Basis, LpOptions, LpProblem, LpStatus};
use crate::routing::{Route, RouteKind};
use crate::scalar::Scalar;
use crate::scenario::{HopLimits, Scenario};

/// Activated routes, deduplicated by vertex sequence, in insertion order.
#[derive(Clone, Debug, Default)]
pub struct ColumnPool {
    routes: Vec<Route>,
    lookup: HashMap<Route, usize>,
    intersat: usize,
}

impl ColumnPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn num_intersat(&self) -> usize {
        self.intersat
    }

    pub fn num_ground(&self) -> usize {
        self.routes.len() - self.intersat
    }

    pub fn contains(&self, route: &Route) -> bool {
        self.lookup.contains_key(route)
    }

    pub fn position(&self, route: &Route) -> Option<usize> {
        self.lookup.get(route).copied()
    }

    /// Inserts the routes not already pooled and returns how many were new.
    /// Every route is validated first, so an invalid one leaves the pool untouched.
    pub fn add_columns<T>(
        &mut self,
        topology: &Topology<T>,
        hops: HopLimits,
        routes: impl IntoIterator<Item = Route>,
    ) -> Result<usize> {
        let routes: Vec<Route> = routes.into_iter().collect();
        for r in &routes {
            r.validate(topology, hops)?;
        }
        let before = self.routes.len();
        for r in routes {
            if self.lookup.contains_key(&r) {
                continue;
            }
            if r.kind() == RouteKind::InterSatellite {
                self.intersat += 1;
            }
            self.lookup.insert(r.clone(), self.routes.len());
            self.routes.push(r);
        }
        Ok(self.routes.len() - before)
    }
}

/// Row offsets of the master problem for one topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowLayout {
    pub isl_rows: usize,
    pub sgl_rows: usize,
    pub satellites: usize,
}

impl RowLayout {
    pub fn new<T>(topology: &Topology<T>) -> Self {
        RowLayout {
            isl_rows: topology.isl_row_count(),
            sgl_rows: topology.num_sgl(),
            satellites: topology.num_satellites(),
        }
    }

    pub fn sgl(&self, slot: usize) -> usize {
        self.isl_rows + slot
    }

    pub fn compute(&self, sat: NodeId) -> usize {
        self.isl_rows + self.sgl_rows + sat.index() - 1
    }

    pub fn data(&self, sat: NodeId) -> usize {
        self.isl_rows + self.sgl_rows + self.satellites + sat.index() - 1
    }

    pub fn num_rows(&self) -> usize {
        self.isl_rows + self.sgl_rows + 2 * self.satellites
    }
}

/// Constraint entries of one route's flow variable.
pub fn route_column<T: Scalar>(topology: &Topology<T>, route: &Route) -> Result<Vec<(usize, T)>> {
    let layout = RowLayout::new(topology);
    let mut entries = Vec::with_capacity(route.hops() + 2);
    for (u, v) in route.arcs() {
        let e = topology
            .edge_between(u, v)
            .ok_or(Error::UnknownEdge(u, v))?;
        let row = match topology.edge(e).kind {
            LinkKind::Isl => topology.isl_row(e, u),
            LinkKind::Sgl => layout.sgl(topology.sgl_slot(e)),
        };
        entries.push((row, T::one()));
    }
    if route.kind() == RouteKind::InterSatellite {
        entries.push((layout.compute(route.terminal()), T::one()));
    }
    entries.push((layout.data(route.source()), T::one()));
    Ok(entries)
}

fn route_objective<T: Scalar>(scenario: &Scenario<T>, route: &Route) -> T {
    match route.kind() {
        RouteKind::InterSatellite => scenario.weights().intersat,
        RouteKind::SatelliteToGround => scenario.weights().ground,
    }
}

/// Master LP with only the local-computing variables.
fn local_rmp<T: Scalar>(scenario: &Scenario<T>) -> LpProblem<T> {
    let topo = scenario.topology();
    let layout = RowLayout::new(topo);
    let mut rhs = Vec::with_capacity(layout.num_rows());
    match topo.duplex() {
        DuplexMode::Shared => rhs.extend(topo.isl_edges().iter().map(|e| e.capacity)),
        DuplexMode::FullDuplex => rhs.extend(
            topo.isl_edges()
                .iter()
                .flat_map(|e| [e.capacity, e.capacity]),
        ),
    }
    rhs.extend(topo.sgl_edges().iter().map(|e| e.capacity));
    rhs.extend_from_slice(scenario.compute_capacities());
    rhs.extend_from_slice(scenario.demands());
    let mut p = LpProblem::new(rhs);
    for sat in topo.satellites() {
        p.add_column(
            scenario.weights().local,
            vec![
                (layout.compute(sat), T::one()),
                (layout.data(sat), T::one()),
            ],
        );
    }
    p
}

/// Builds the restricted master LP over the pooled routes.
pub fn build_rmp<T: Scalar>(scenario: &Scenario<T>, pool: &ColumnPool) -> Result<LpProblem<T>> {
    let mut p = local_rmp(scenario);
    for r in pool.routes() {
        p.add_column(
            route_objective(scenario, r),
            route_column(scenario.topology(), r)?,
        );
    }
    Ok(p)
}

/// Named dual multipliers of the master rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualPrices<T> {
    /// One per ISL capacity row (per edge, or per direction in full duplex).
    pub isl: Vec<T>,
    /// One per SGL, in SGL order.
    pub sgl: Vec<T>,
    /// Compute rows, by satellite position.
    pub compute: Vec<T>,
    /// Data rows, by satellite position.
    pub data: Vec<T>,
}

impl<T: Scalar> DualPrices<T> {
    pub fn zeros<U>(topology: &Topology<U>) -> Self {
        let l = RowLayout::new(topology);
        DualPrices {
            isl: vec![T::zero(); l.isl_rows],
            sgl: vec![T::zero(); l.sgl_rows],
            compute: vec![T::zero(); l.satellites],
            data: vec![T::zero(); l.satellites],
        }
    }

    /// Splits an LP dual vector according to the row layout.
    pub fn from_lp<U>(topology: &Topology<U>, y: &[T]) -> Self {
        let l = RowLayout::new(topology);
        assert_eq!(
            y.len(),
            l.num_rows(),
            "dual vector does not match the master rows"
        );
        let (isl, rest) = y.split_at(l.isl_rows);
        let (sgl, rest) = rest.split_at(l.sgl_rows);
        let (compute, data) = rest.split_at(l.satellites);
        DualPrices {
            isl: isl.to_vec(),
            sgl: sgl.to_vec(),
            compute: compute.to_vec(),
            data: data.to_vec(),
        }
    }

    /// Dual vector in row order.
    pub fn to_lp(&self) -> Vec<T> {
        let mut y = self.isl.clone();
        y.extend_from_slice(&self.sgl);
        y.extend_from_slice(&self.compute);
        y.extend_from_slice(&self.data);
        y
    }

    pub fn compute_of(&self, sat: NodeId) -> T {
        self.compute[sat.index() - 1]
    }

    pub fn data_of(&self, sat: NodeId) -> T {
        self.data[sat.index() - 1]
    }

    /// Weight of traversing an ISL from `u` to `v`.
    pub fn arc_weight<U>(&self, topology: &Topology<U>, u: NodeId, v: NodeId) -> Option<T> {
        let e = topology.edge_between(u, v)?;
        (e < topology.num_isl()).then(|| self.isl[topology.isl_row(e, u)])
    }

    /// SGL multiplier of a gateway.
    pub fn sgl_of<U>(&self, topology: &Topology<U>, gateway: NodeId) -> Option<T> {
        topology
            .sgl_of(gateway)
            .map(|e| self.sgl[topology.sgl_slot(e)])
    }

    /// Dual-weighted column of a route: the left side of its dual constraint.
    pub fn route_price<U>(&self, topology: &Topology<U>, route: &Route) -> Result<T> {
        let mut total = self.data_of(route.source());
        for (u, v) in route.isl_arcs() {
            total += self
                .arc_weight(topology, u, v)
                .ok_or(Error::UnknownEdge(u, v))?;
        }
        match route.kind() {
            RouteKind::InterSatellite => total += self.compute_of(route.terminal()),
            RouteKind::SatelliteToGround => {
                let g = route.gateway().expect("ground route has a gateway");
                total += self
                    .sgl_of(topology, g)
                    .ok_or(Error::UnknownEdge(g, NodeId::GROUND))?;
            }
        }
        Ok(total)
    }

    /// Objective coefficient minus price; positive means the route can improve the master.
    pub fn reduced_cost(&self, scenario: &Scenario<T>, route: &Route) -> Result<T> {
        Ok(route_objective(scenario, route) - self.route_price(scenario.topology(), route)?)
    }

    /// Dual objective `bᵀy` for the scenario's right-hand sides.
    pub fn dual_objective(&self, scenario: &Scenario<T>) -> T {
        local_rmp(scenario).dual_objective(&self.to_lp())
    }

    pub fn min_value(&self) -> T {
        self.isl
            .iter()
            .chain(&self.sgl)
            .chain(&self.compute)
            .chain(&self.data)
            .fold(T::infinity(), |a, &b| a.min(b))
    }
}

/// Computed volume per layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LayerVolumes<T> {
    pub local: T,
    pub intersat: T,
    pub ground: T,
}

impl<T: Scalar> LayerVolumes<T> {
    pub fn total(&self) -> T {
        self.local + self.intersat + self.ground
    }
}

/// Any offloading decision: local volumes plus flows on explicit routes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Allocation<T> {
    pub local: Vec<T>,
    pub flows: Vec<(Route, T)>,
}

impl<T: Scalar> Allocation<T> {
    pub fn objective(&self, scenario: &Scenario<T>) -> T {
        let w = scenario.weights();
        let v = self.layer_volumes();
        w.local * v.local + w.intersat * v.intersat + w.ground * v.ground
    }

    pub fn layer_volumes(&self) -> LayerVolumes<T> {
        let mut v = LayerVolumes {
            local: self.local.iter().copied().sum(),
            intersat: T::zero(),
            ground: T::zero(),
        };
        for (r, f) in &self.flows {
            match r.kind() {
                RouteKind::InterSatellite => v.intersat += *f,
                RouteKind::SatelliteToGround => v.ground += *f,
            }
        }
        v
    }

    /// Lists every violated constraint (capacity, compute, data, sign, route validity).
    pub fn check_feasibility(&self, scenario: &Scenario<T>, tol: T) -> Vec<String> {
        let topo = scenario.topology();
        let layout = RowLayout::new(topo);
        let problem = local_rmp(scenario);
        let mut load = vec![T::zero(); layout.num_rows()];
        let mut issues = Vec::new();
        if self.local.len() != layout.satellites {
            issues.push(format!(
                "{} local volumes for {} satellites",
                self.local.len(),
                layout.satellites
            ));
            return issues;
        }
        for (i, &x) in self.local.iter().enumerate() {
            let sat = NodeId(i as u32 + 1);
            if x < -tol {
                issues.push(format!("negative local volume at satellite {sat}"));
            }
            load[layout.compute(sat)] += x;
            load[layout.data(sat)] += x;
        }
        for (r, f) in &self.flows {
            if *f < -tol {
                issues.push(format!("negative flow on route {r}"));
            }
            if let Err(e) = r.validate(topo, scenario.hops()) {
                issues.push(e.to_string());
                continue;
            }
            match route_column::<T>(topo, r) {
                Ok(col) => {
                    for (row, a) in col {
                        load[row] += a * *f;
                    }
                }
                Err(e) => issues.push(e.to_string()),
            }
        }
        for (row, (&l, &b)) in load.iter().zip(problem.rhs()).enumerate() {
            if l > b + tol * (T::one() + b.abs()) {
                issues.push(format!(
                    "row {} ({}) loaded {l} above {b}",
                    row,
                    row_label(topo, &layout, row)
                ));
            }
        }
        issues
    }
}

fn row_label<T>(topology: &Topology<T>, layout: &RowLayout, row: usize) -> String {
    let sat_base = layout.isl_rows + layout.sgl_rows;
    if row < layout.isl_rows {
        let e = match topology.duplex() {
            DuplexMode::Shared => row,
            DuplexMode::FullDuplex => row / 2,
        };
        let e = topology.edge(e);
        format!("ISL {}-{}", e.a, e.b)
    } else if row < sat_base {
        let e = &topology.sgl_edges()[row - layout.isl_rows];
        format!("SGL {}-{}", e.a, e.b)
    } else if row < sat_base + layout.satellites {
        format!("compute {}", row - sat_base + 1)
    } else {
        format!("data {}", row - sat_base - layout.satellites + 1)
    }
}

/// Optimal solution of a restricted master problem.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterSolution<T> {
    pub objective: T,
    /// Local volume per satellite.
    pub local: Vec<T>,
    /// Flow per pooled route, in pool order.
    pub flows: Vec<T>,
    pub duals: DualPrices<T>,
    pub lp_iterations: usize,
    pub basis: Option<Basis>,
    pub warm_started: bool,
}

impl<T: Scalar> MasterSolution<T> {
    /// Routes with flow above `threshold`, paired with their flows.
    pub fn allocation(&self, pool: &ColumnPool, threshold: T) -> Allocation<T> {
        Allocation {
            local: self.local.clone(),
            flows: pool
                .routes()
                .iter()
                .zip(&self.flows)
                .filter(|(_, &f)| f > threshold)
                .map(|(r, &f)| (r.clone(), f))
                .collect(),
        }
    }
}

fn master_solution<T: Scalar>(
    topology: &Topology<T>,
    solution: lp::LpSolution<T>,
) -> Result<MasterSolution<T>> {
    if solution.status != LpStatus::Optimal {
        return Err(Error::LpStatus(solution.status));
    }
    let n = topology.num_satellites();
    let mut primal = solution.primal;
    let flows = primal.split_off(n);
    Ok(MasterSolution {
        objective: solution.objective,
        local: primal,
        flows,
        duals: DualPrices::from_lp(topology, &solution.duals),
        lp_iterations: solution.iterations,
        basis: solution.basis,
        warm_started: solution.warm_started,
    })
}

/// Solves the restricted master from scratch.
pub fn solve_rmp<T: Scalar>(
    scenario: &Scenario<T>,
    pool: &ColumnPool,
    options: &LpOptions<T>,
) -> Result<MasterSolution<T>> {
    let p = build_rmp(scenario, pool)?;
    master_solution(scenario.topology(), lp::solve(&p, options)?)
}

/// Master LP kept alive across column-generation iterations so that each
/// re-solve can start from the previous optimal basis.
#[derive(Clone, Debug)]
pub struct RestrictedMaster<'a, T> {
    scenario: &'a Scenario<T>,
    pool: ColumnPool,
    problem: LpProblem<T>,
    basis: Option<Basis>,
    options: LpOptions<T>,
}

impl<'a, T: Scalar> RestrictedMaster<'a, T> {
    pub fn new(scenario: &'a Scenario<T>, options: LpOptions<T>) -> Self {
        RestrictedMaster {
            scenario,
            pool: ColumnPool::new(),
            problem: local_rmp(scenario),
            basis: None,
            options,
        }
    }

    pub fn pool(&self) -> &ColumnPool {
        &self.pool
    }

    pub fn problem(&self) -> &LpProblem<T> {
        &self.problem
    }

    /// Pools the new routes and appends their columns.
    pub fn add_columns(&mut self, routes: impl IntoIterator<Item = Route>) -> Result<usize> {
        let start = self.pool.len();
        let added =
            self.pool
                .add_columns(self.scenario.topology(), self.scenario.hops(), routes)?;
        for r in &self.pool.routes()[start..] {
            let col = route_column(self.scenario.topology(), r)?;
            self.problem
                .add_column(route_objective(self.scenario, r), col);
        }
        Ok(added)
    }

    /// Re-solves, warm-started from the last optimal basis when there is one.
    /// A failed warm solve is retried cold.
    pub fn solve(&mut self) -> Result<MasterSolution<T>> {
        let warm = match &self.basis {
            Some(b) => match lp::solve_from_basis(&self.problem, b, &self.options) {
                Ok(s) if s.is_optimal() => Some(s),
                _ => None,
            },
            None => None,
        };
        let sol = match warm {
            Some(s) => s,
            None => lp::solve(&self.problem, &self.options)?,
        };
        let out = master_solution(self.scenario.topology(), sol)?;
        self.basis = out.basis.clone();
        Ok(out)
    }

    /// Solves from the slack basis, ignoring any stored basis.
    pub fn solve_cold(&mut self) -> Result<MasterSolution<T>> {
        let out = master_solution(
            self.scenario.topology(),
            lp::solve(&self.problem, &self.options)?,
        )?;
        self.basis = out.basis.clone();
        Ok(out)
    }
}
