//! Reference methods: the fully enumerated LP, a depth-first greedy
//! offloading heuristic, and local-only computing.

use crate::constellation::{DuplexMode, NodeId, Topology};
use crate::error::Result;
use crate::lp::LpOptions;
use crate::master::{solve_rmp, Allocation, ColumnPool, MasterSolution};
use crate::routing::{enumerate_routes, Route};
use crate::scalar::Scalar;
use crate::scenario::Scenario;

/// Master problem solved over every route within the hop limits.
#[derive(Clone, Debug)]
pub struct EnumeratedSolution<T> {
    pub objective: T,
    pub master: MasterSolution<T>,
    pub pool: ColumnPool,
}

impl<T: Scalar> EnumeratedSolution<T> {
    pub fn allocation(&self, threshold: T) -> Allocation<T> {
        self.master.allocation(&self.pool, threshold)
    }
}

/// Globally optimal objective by brute force over the route universe.
pub fn solve_full_enumeration<T: Scalar>(
    scenario: &Scenario<T>,
    ceiling: Option<usize>,
    options: &LpOptions<T>,
) -> Result<EnumeratedSolution<T>> {
    let routes = enumerate_routes(scenario.topology(), scenario.hops(), ceiling)?;
    let mut pool = ColumnPool::new();
    pool.add_columns(scenario.topology(), scenario.hops(), routes.iter().cloned())?;
    let master = solve_rmp(scenario, &pool, options)?;
    Ok(EnumeratedSolution {
        objective: master.objective,
        master,
        pool,
    })
}

/// A feasible allocation produced by a heuristic.
#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicSolution<T> {
    pub objective: T,
    pub allocation: Allocation<T>,
}

/// `a · Σ min(D_i, C_i)`.
pub fn solve_local_only<T: Scalar>(scenario: &Scenario<T>) -> HeuristicSolution<T> {
    let local: Vec<T> = scenario
        .demands()
        .iter()
        .zip(scenario.compute_capacities())
        .map(|(&d, &c)| d.min(c))
        .collect();
    let allocation = Allocation {
        local,
        flows: Vec::new(),
    };
    HeuristicSolution {
        objective: allocation.objective(scenario),
        allocation,
    }
}

/// Remaining ISL, SGL and compute capacity while the heuristic reserves flow.
struct Residual<'a, T> {
    topology: &'a Topology<T>,
    isl: Vec<T>,
    sgl: Vec<T>,
    compute: Vec<T>,
}

impl<T: Scalar> Residual<'_, T> {
    fn isl_left(&self, u: NodeId, v: NodeId) -> T {
        let e = self.topology.edge_between(u, v).expect("ISL on a DFS path");
        self.isl[self.topology.isl_row(e, u)]
    }

    fn bottleneck(&self, path: &[NodeId]) -> T {
        path.windows(2)
            .map(|w| self.isl_left(w[0], w[1]))
            .fold(T::infinity(), |a, b| a.min(b))
    }

    fn reserve_path(&mut self, path: &[NodeId], amount: T) {
        for w in path.windows(2) {
            let e = self
                .topology
                .edge_between(w[0], w[1])
                .expect("ISL on a DFS path");
            let row = self.topology.isl_row(e, w[0]);
            self.isl[row] = (self.isl[row] - amount).max(T::zero());
        }
    }
}

struct Dfs<'a, T> {
    scenario: &'a Scenario<T>,
    left: Residual<'a, T>,
    flows: Vec<(Route, T)>,
    eps: T,
}

impl<T: Scalar> Dfs<'_, T> {
    /// Places residual demand of `path[0]` at `path.last()` and beyond.
    /// Returns what is still unplaced.
    fn visit(&mut self, path: &mut Vec<NodeId>, mut residual: T) -> T {
        let hops = self.scenario.hops();
        let topo = self.scenario.topology();
        let node = *path.last().expect("nonempty path");
        let depth = path.len() - 1;

        if depth >= 1 && depth <= hops.intersat {
            let slot = node.index() - 1;
            let take = residual
                .min(self.left.compute[slot])
                .min(self.left.bottleneck(path));
            if take > self.eps {
                self.left.compute[slot] -= take;
                self.left.reserve_path(path, take);
                self.flows
                    .push((Route::inter_satellite(path.clone()), take));
                residual -= take;
            }
        }
        if residual <= self.eps {
            return T::zero();
        }

        if depth < hops.ground {
            if let Some(e) = topo.sgl_of(node) {
                let slot = topo.sgl_slot(e);
                let take = residual
                    .min(self.left.sgl[slot])
                    .min(self.left.bottleneck(path));
                if take > self.eps {
                    self.left.sgl[slot] -= take;
                    self.left.reserve_path(path, take);
                    let mut vertices = path.clone();
                    vertices.push(NodeId::GROUND);
                    self.flows.push((Route::ground(vertices), take));
                    residual -= take;
                }
            }
        }
        if residual <= self.eps {
            return T::zero();
        }

        let reach = hops.intersat.max(hops.ground.saturating_sub(1));
        if depth < reach {
            for (next, _) in topo.isl_neighbors(node) {
                if path.contains(&next) || self.left.isl_left(node, next) <= self.eps {
                    continue;
                }
                path.push(next);
                residual = self.visit(path, residual);
                path.pop();
                if residual <= self.eps {
                    return T::zero();
                }
            }
        }
        residual
    }
}

/// Greedy depth-first offloading.
///
/// Every satellite first computes as much of its own demand as it can. Then,
/// in ascending satellite order, the leftover demand is pushed depth-first
/// from its source: at each visited node it is computed there (if within the
/// inter-satellite hop limit), then sent down the node's SGL (if it is a
/// gateway and within the ground hop limit), then carried on to unvisited ISL
/// neighbours in ascending order. Each placement reserves the path's ISL
/// capacity and the terminal's compute or SGL capacity.
pub fn solve_dfs<T: Scalar>(scenario: &Scenario<T>) -> HeuristicSolution<T> {
    let topo = scenario.topology();
    let local = solve_local_only(scenario).allocation.local;
    let compute = scenario
        .compute_capacities()
        .iter()
        .zip(&local)
        .map(|(&c, &x)| c - x)
        .collect();
    let isl = (0..topo.isl_row_count())
        .map(|row| {
            let e = match topo.duplex() {
                DuplexMode::Shared => row,
                DuplexMode::FullDuplex => row / 2,
            };
            topo.edge(e).capacity
        })
        .collect();
    let sgl = topo.sgl_edges().iter().map(|e| e.capacity).collect();
    let mut dfs = Dfs {
        scenario,
        left: Residual {
            topology: topo,
            isl,
            sgl,
            compute,
        },
        flows: Vec::new(),
        eps: T::lit(T::FEASIBILITY_TOL),
    };
    for s in topo.satellites() {
        let residual = scenario.demand(s) - local[s.index() - 1];
        if residual > dfs.eps {
            dfs.visit(&mut vec![s], residual);
        }
    }
    let allocation = Allocation {
        local,
        flows: dfs.flows,
    };
    HeuristicSolution {
        objective: allocation.objective(scenario),
        allocation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{Edge, LinkKind};
    use crate::scenario::{load_scenario, HopLimits, ScenarioDocument, Weights};

    fn line(demands: Vec<f64>, hops: usize) -> Scenario<f64> {
        let topo = Topology::from_parts(
            0,
            0,
            2,
            false,
            DuplexMode::Shared,
            vec![
                Edge::new(NodeId(1), NodeId(2), LinkKind::Isl, 5.0),
                Edge::new(NodeId(2), NodeId(0), LinkKind::Sgl, 1.0),
            ],
        )
        .unwrap();
        Scenario::new(
            topo,
            demands,
            vec![10.0, 10.0],
            Weights::reference(),
            HopLimits {
                intersat: hops,
                ground: 0,
            },
            1.0,
        )
        .unwrap()
    }

    fn reference(seed: u64, h: usize) -> Scenario<f64> {
        load_scenario(&ScenarioDocument::reference(seed, h), None).unwrap()
    }

    #[test]
    fn line_instance() {
        let s = line(vec![20.0, 0.0], 1);
        let full = solve_full_enumeration(&s, None, &LpOptions::default()).unwrap();
        assert!((full.objective - 7.5).abs() < 1e-9);
        let dfs = solve_dfs(&s);
        assert!((dfs.objective - 7.5).abs() < 1e-12);
        assert_eq!(dfs.allocation.local, vec![10.0, 0.0]);
        assert_eq!(dfs.allocation.flows.len(), 1);
        assert!(dfs.allocation.check_feasibility(&s, 1e-9).is_empty());
    }

    #[test]
    fn zero_hops() {
        let s = reference(1, 0);
        let local = solve_local_only(&s).objective;
        let full = solve_full_enumeration(&s, None, &LpOptions::default()).unwrap();
        assert!((full.objective - local).abs() < 1e-9);
        assert_eq!(solve_dfs(&s).objective, local);
    }

    #[test]
    fn light_demand_stays_local() {
        let s = line(vec![3.0, 4.0], 1);
        let dfs = solve_dfs(&s);
        assert!(dfs.allocation.flows.is_empty());
        assert!((dfs.objective - 0.6 * 7.0).abs() < 1e-12);
        assert_eq!(
            solve_local_only(&line(vec![10.0, 10.0], 1)).objective,
            0.6 * 20.0
        );
        assert_eq!(solve_local_only(&line(vec![0.0, 0.0], 1)).objective, 0.0);
    }

    #[test]
    fn ordering_on_reference_instances() {
        for (seed, h) in [(1, 1), (2, 2), (3, 3)] {
            let s = reference(seed, h);
            let local = solve_local_only(&s).objective;
            let dfs = solve_dfs(&s);
            let full = solve_full_enumeration(&s, None, &LpOptions::default()).unwrap();
            assert!(dfs.allocation.check_feasibility(&s, 1e-9).is_empty());
            assert!(local <= dfs.objective + 1e-9);
            assert!(
                dfs.objective <= full.objective + 1e-9,
                "{} > {}",
                dfs.objective,
                full.objective
            );
            for (r, _) in &dfs.allocation.flows {
                r.validate(s.topology(), s.hops()).unwrap();
            }
        }
    }

    #[test]
    fn full_duplex_dfs_is_feasible() {
        let mut s = reference(4, 3);
        let topo = s.topology().clone().with_duplex(DuplexMode::FullDuplex);
        s = Scenario::new(
            topo,
            s.demands().to_vec(),
            s.compute_capacities().to_vec(),
            s.weights(),
            s.hops(),
            1.0,
        )
        .unwrap();
        let dfs = solve_dfs(&s);
        assert!(dfs.allocation.check_feasibility(&s, 1e-9).is_empty());
        let full = solve_full_enumeration(&s, None, &LpOptions::default()).unwrap();
        assert!(dfs.objective <= full.objective + 1e-9);
    }
}
