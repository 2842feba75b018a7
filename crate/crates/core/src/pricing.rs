//! Column pricing: hop-truncated Bellman-Ford over ISL duals, and the tests
//! that pick inter-satellite and ground routes with positive reduced cost.

use rayon::prelude::*;

use crate::constellation::{NodeId, Topology};
use crate::error::{Error, Result};
use crate::master::DualPrices;
use crate::routing::Route;
use crate::scalar::Scalar;
use crate::scenario::Scenario;

/// Minimum ISL weight from one source using at most `m` edges, for every
/// level `m` in `0..=H`.
#[derive(Clone, Debug, PartialEq)]
pub struct HopDistanceTable<T> {
    source: NodeId,
    /// `dist[m][node]`, infinite when unreachable within `m` edges.
    dist: Vec<Vec<T>>,
    /// Last arc of the level-`m` minimiser: the previous vertex and the level
    /// at which its own path is stored.
    pred: Vec<Vec<Option<(NodeId, usize)>>>,
}

impl<T: Scalar> HopDistanceTable<T> {
    pub fn source(&self) -> NodeId {
        self.source
    }

    /// Largest hop level `H` held by the table.
    pub fn max_hops(&self) -> usize {
        self.dist.len() - 1
    }

    pub fn distance(&self, m: usize, target: NodeId) -> T {
        self.dist[m][target.index()]
    }

    /// Vertex sequence of the level-`m` minimiser, `None` if unreachable.
    pub fn path(&self, m: usize, target: NodeId) -> Result<Option<Vec<NodeId>>> {
        if !self.dist[m][target.index()].is_finite() {
            return Ok(None);
        }
        let mut path = vec![target];
        let mut at = (target, m);
        while let Some((prev, level)) = self.pred[at.1][at.0.index()] {
            path.push(prev);
            at = (prev, level);
        }
        path.reverse();
        if path[0] != self.source {
            return Err(Error::NonSimplePath(format!(
                "reconstruction of {target} did not reach the source"
            )));
        }
        let mut seen = path.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != path.len() || path.len() > m + 1 {
            let s: Vec<String> = path.iter().map(|v| v.to_string()).collect();
            return Err(Error::NonSimplePath(s.join("-")));
        }
        Ok(Some(path))
    }
}

/// Runs `H` rounds of Bellman-Ford relaxation over the ISL graph.
///
/// `alpha` holds one weight per ISL capacity row (see
/// [`Topology::isl_row`]), so full-duplex topologies price each direction on
/// its own. A level only replaces the previous one on strict improvement and
/// neighbours are scanned in ascending order, so ties resolve to the fewest
/// hops and then the lowest-index predecessor.
pub fn truncated_bellman_ford<T: Scalar>(
    topology: &Topology<T>,
    alpha: &[T],
    source: NodeId,
    hops: usize,
) -> Result<HopDistanceTable<T>> {
    if !source.is_satellite() || !topology.contains(source) {
        return Err(Error::UnknownNode(source));
    }
    if alpha.len() != topology.isl_row_count() {
        return Err(Error::InvalidParameter(format!(
            "expected {} ISL weights, got {}",
            topology.isl_row_count(),
            alpha.len()
        )));
    }
    if let Some((row, &w)) = alpha.iter().enumerate().find(|(_, w)| !(**w >= T::zero())) {
        return Err(Error::NegativeWeight {
            edge: row,
            weight: w.as_f64(),
        });
    }
    let n = topology.num_nodes();
    let mut dist = vec![vec![T::infinity(); n]];
    let mut pred = vec![vec![None; n]];
    dist[0][source.index()] = T::zero();
    for m in 1..=hops {
        let prev = &dist[m - 1];
        let mut cur = prev.clone();
        let mut cur_pred = pred[m - 1].clone();
        for j in topology.satellites() {
            for (i, e) in topology.isl_neighbors(j) {
                let du = prev[i.index()];
                if !du.is_finite() {
                    continue;
                }
                let cand = du + alpha[topology.isl_row(e, i)];
                if cand < cur[j.index()] {
                    cur[j.index()] = cand;
                    cur_pred[j.index()] = Some((i, m - 1));
                }
            }
        }
        dist.push(cur);
        pred.push(cur_pred);
    }
    Ok(HopDistanceTable { source, dist, pred })
}

/// A route whose dual constraint is violated, with its reduced cost.
#[derive(Clone, Debug, PartialEq)]
pub struct PricedRoute<T> {
    pub route: Route,
    pub reduced_cost: T,
}

/// Improving columns of one pricing round.
#[derive(Clone, Debug, PartialEq)]
pub struct PricingRound<T> {
    pub intersat: Vec<PricedRoute<T>>,
    pub ground: Vec<PricedRoute<T>>,
}

impl<T> PricingRound<T> {
    pub fn len(&self) -> usize {
        self.intersat.len() + self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_routes(self) -> impl Iterator<Item = Route> {
        self.intersat
            .into_iter()
            .chain(self.ground)
            .map(|p| p.route)
    }
}

/// Violating inter-satellite routes and the best violating ground route of one source.
type SourceRound<T> = (Vec<PricedRoute<T>>, Option<PricedRoute<T>>);

fn price_source<T: Scalar>(
    scenario: &Scenario<T>,
    duals: &DualPrices<T>,
    source: NodeId,
    tol: T,
    want_intersat: bool,
    want_ground: bool,
) -> Result<SourceRound<T>> {
    let topo = scenario.topology();
    let hops = scenario.hops();
    let w = scenario.weights();
    let ground_levels = hops.ground.checked_sub(1).filter(|_| want_ground);
    let levels = match (want_intersat, ground_levels) {
        (true, Some(g)) => hops.intersat.max(g),
        (true, None) => hops.intersat,
        (false, Some(g)) => g,
        (false, None) => return Ok((Vec::new(), None)),
    };
    let table = truncated_bellman_ford(topo, &duals.isl, source, levels)?;
    let gamma = duals.data_of(source);

    let mut inter = Vec::new();
    if want_intersat && hops.intersat > 0 {
        for t in topo.satellites().filter(|&t| t != source) {
            let u = table.distance(hops.intersat, t);
            if !u.is_finite() {
                continue;
            }
            let rc = w.intersat - gamma - duals.compute_of(t) - u;
            if rc > tol {
                let path = table
                    .path(hops.intersat, t)?
                    .expect("finite distance has a path");
                inter.push(PricedRoute {
                    route: Route::inter_satellite(path),
                    reduced_cost: rc,
                });
            }
        }
    }

    let mut ground = None;
    if let Some(level) = ground_levels {
        let mut best: Option<(NodeId, T)> = None;
        for &g in topo.gateways() {
            let u = table.distance(level, g);
            if !u.is_finite() {
                continue;
            }
            let beta = duals.sgl_of(topo, g).expect("gateway has an SGL");
            let v = u + beta;
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((g, v));
            }
        }
        if let Some((g, v)) = best {
            let rc = w.ground - gamma - v;
            if rc > tol {
                let mut path = table.path(level, g)?.expect("finite distance has a path");
                path.push(NodeId::GROUND);
                ground = Some(PricedRoute {
                    route: Route::ground(path),
                    reduced_cost: rc,
                });
            }
        }
    }
    Ok((inter, ground))
}

fn price<T: Scalar>(
    scenario: &Scenario<T>,
    duals: &DualPrices<T>,
    tol: T,
    want_intersat: bool,
    want_ground: bool,
) -> Result<PricingRound<T>> {
    let sources: Vec<NodeId> = scenario.topology().satellites().collect();
    let per_source: Vec<_> = sources
        .par_iter()
        .map(|&s| price_source(scenario, duals, s, tol, want_intersat, want_ground))
        .collect::<Result<_>>()?;
    let mut round = PricingRound {
        intersat: Vec::new(),
        ground: Vec::new(),
    };
    for (inter, ground) in per_source {
        round.intersat.extend(inter);
        round.ground.extend(ground);
    }
    Ok(round)
}

/// For every ordered satellite pair, the minimum-weight route within the
/// inter-satellite hop limit when its reduced cost exceeds `tol`.
pub fn find_violating_intersat<T: Scalar>(
    scenario: &Scenario<T>,
    duals: &DualPrices<T>,
    tol: T,
) -> Result<Vec<PricedRoute<T>>> {
    Ok(price(scenario, duals, tol, true, false)?.intersat)
}

/// For every source satellite, the best ground route over all gateways when
/// its reduced cost exceeds `tol`.
pub fn find_violating_ground<T: Scalar>(
    scenario: &Scenario<T>,
    duals: &DualPrices<T>,
    tol: T,
) -> Result<Vec<PricedRoute<T>>> {
    Ok(price(scenario, duals, tol, false, true)?.ground)
}

/// Both searches from one Bellman-Ford table per source.
pub fn find_violating<T: Scalar>(
    scenario: &Scenario<T>,
    duals: &DualPrices<T>,
    tol: T,
) -> Result<PricingRound<T>> {
    price(scenario, duals, tol, true, true)
}
