//! Routes (the columns of the master problem), hop-bounded enumeration of the
//! full route universe, and route/edge incidence.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constellation::{LinkKind, NodeId, Topology};
use crate::error::{Error, Result};
use crate::scenario::HopLimits;

/// Default cap on the number of enumerated routes.
pub const DEFAULT_ENUMERATION_CEILING: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteKind {
    InterSatellite,
    SatelliteToGround,
}

/// Simple path identified by its exact vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Route {
    kind: RouteKind,
    vertices: Vec<NodeId>,
}

impl Route {
    pub fn inter_satellite(vertices: Vec<NodeId>) -> Self {
        Route {
            kind: RouteKind::InterSatellite,
            vertices,
        }
    }

    /// `vertices` must end with the ground station.
    pub fn ground(vertices: Vec<NodeId>) -> Self {
        Route {
            kind: RouteKind::SatelliteToGround,
            vertices,
        }
    }

    pub fn kind(&self) -> RouteKind {
        self.kind
    }

    pub fn is_ground(&self) -> bool {
        self.kind == RouteKind::SatelliteToGround
    }

    pub fn vertices(&self) -> &[NodeId] {
        &self.vertices
    }

    pub fn hops(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn source(&self) -> NodeId {
        self.vertices[0]
    }

    /// Last vertex: the terminal satellite, or the ground station.
    pub fn terminal(&self) -> NodeId {
        *self.vertices.last().expect("route has vertices")
    }

    /// Satellite holding the SGL of a ground route.
    pub fn gateway(&self) -> Option<NodeId> {
        match self.kind {
            RouteKind::SatelliteToGround if self.vertices.len() >= 2 => {
                Some(self.vertices[self.vertices.len() - 2])
            }
            _ => None,
        }
    }

    /// Consecutive vertex pairs in traversal order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Arcs over ISLs only (a ground route's final SGL is excluded).
    pub fn isl_arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let n = match self.kind {
            RouteKind::InterSatellite => self.vertices.len(),
            RouteKind::SatelliteToGround => self.vertices.len().saturating_sub(1),
        };
        self.vertices[..n].windows(2).map(|w| (w[0], w[1]))
    }

    /// Checks every route invariant against a topology and hop limits.
    pub fn validate<T>(&self, topology: &Topology<T>, hops: HopLimits) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidRoute {
                route: self.to_string(),
                reason: reason.to_string(),
            })
        };
        if self.vertices.len() < 2 {
            return fail("a route needs at least one hop");
        }
        let mut seen = vec![false; topology.num_nodes()];
        for &v in &self.vertices {
            if !topology.contains(v) {
                return fail("unknown vertex");
            }
            if std::mem::replace(&mut seen[v.index()], true) {
                return fail("vertices must be distinct");
            }
        }
        let sats = match self.kind {
            RouteKind::InterSatellite => {
                if self.hops() > hops.intersat {
                    return fail("exceeds the inter-satellite hop limit");
                }
                &self.vertices[..]
            }
            RouteKind::SatelliteToGround => {
                if !self.terminal().is_ground() {
                    return fail("ground route must end at the ground station");
                }
                if self.hops() > hops.ground {
                    return fail("exceeds the ground hop limit");
                }
                &self.vertices[..self.vertices.len() - 1]
            }
        };
        if sats.iter().any(|v| v.is_ground()) {
            return fail("only the final vertex of a ground route may be the ground station");
        }
        for (u, v) in self.arcs() {
            let Some(e) = topology.edge_between(u, v) else {
                return fail("consecutive vertices are not adjacent");
            };
            let expected = if v.is_ground() {
                LinkKind::Sgl
            } else {
                LinkKind::Isl
            };
            if topology.edge(e).kind != expected {
                return fail("wrong link kind");
            }
        }
        Ok(())
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RouteSet {
    pub intersat: Vec<Route>,
    pub ground: Vec<Route>,
}

impl RouteSet {
    pub fn total(&self) -> usize {
        self.intersat.len() + self.ground.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Route> {
        self.intersat.iter().chain(&self.ground)
    }
}

/// Every simple path satisfying the route invariants, sources in ascending
/// order and depth-first with ascending neighbours below each source.
pub fn enumerate_routes<T>(
    topology: &Topology<T>,
    hops: HopLimits,
    ceiling: Option<usize>,
) -> Result<RouteSet> {
    let ceiling = ceiling.unwrap_or(DEFAULT_ENUMERATION_CEILING);
    let depth = hops.intersat.max(hops.ground.saturating_sub(1));
    let mut out = RouteSet::default();
    let mut on_path = vec![false; topology.num_nodes()];
    let mut path = Vec::with_capacity(depth + 2);

    struct Walk<'a, T> {
        topology: &'a Topology<T>,
        hops: HopLimits,
        depth: usize,
        ceiling: usize,
    }

    fn visit<T>(
        w: &Walk<'_, T>,
        path: &mut Vec<NodeId>,
        on_path: &mut [bool],
        out: &mut RouteSet,
    ) -> Result<()> {
        let v = *path.last().unwrap();
        let h = path.len() - 1;
        if h >= 1 && h <= w.hops.intersat {
            out.intersat.push(Route::inter_satellite(path.clone()));
        }
        if h < w.hops.ground && w.topology.sgl_of(v).is_some() {
            let mut vs = path.clone();
            vs.push(NodeId::GROUND);
            out.ground.push(Route::ground(vs));
        }
        if out.total() > w.ceiling {
            return Err(Error::EnumerationCeiling { ceiling: w.ceiling });
        }
        if h < w.depth {
            for (u, _) in w.topology.isl_neighbors(v) {
                if u.is_ground() || on_path[u.index()] {
                    continue;
                }
                on_path[u.index()] = true;
                path.push(u);
                visit(w, path, on_path, out)?;
                path.pop();
                on_path[u.index()] = false;
            }
        }
        Ok(())
    }

    if hops.intersat == 0 && hops.ground == 0 {
        return Ok(out);
    }
    let walk = Walk {
        topology,
        hops,
        depth,
        ceiling,
    };
    for s in topology.satellites() {
        on_path[s.index()] = true;
        path.push(s);
        visit(&walk, &mut path, &mut on_path, &mut out)?;
        path.pop();
        on_path[s.index()] = false;
    }
    Ok(out)
}

/// Incidence of routes (by position in the indexed slice) on edges and satellites.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RouteIndex {
    by_edge: BTreeMap<(NodeId, NodeId), Vec<usize>>,
    start: BTreeMap<NodeId, Vec<usize>>,
    end: BTreeMap<NodeId, Vec<usize>>,
    ground_start: BTreeMap<NodeId, Vec<usize>>,
}

fn edge_key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

pub fn build_route_index(routes: &[Route]) -> RouteIndex {
    let mut idx = RouteIndex::default();
    for (r, route) in routes.iter().enumerate() {
        for (u, v) in route.arcs() {
            idx.by_edge.entry(edge_key(u, v)).or_default().push(r);
        }
        match route.kind() {
            RouteKind::InterSatellite => {
                idx.start.entry(route.source()).or_default().push(r);
                idx.end.entry(route.terminal()).or_default().push(r);
            }
            RouteKind::SatelliteToGround => {
                idx.ground_start.entry(route.source()).or_default().push(r);
            }
        }
    }
    idx
}

impl RouteIndex {
    /// Routes traversing edge `(u, v)` in either direction.
    pub fn through(&self, u: NodeId, v: NodeId) -> &[usize] {
        self.by_edge.get(&edge_key(u, v)).map_or(&[], Vec::as_slice)
    }

    /// Inter-satellite routes sourced at `sat`.
    pub fn started_at(&self, sat: NodeId) -> &[usize] {
        self.start.get(&sat).map_or(&[], Vec::as_slice)
    }

    /// Inter-satellite routes terminating at `sat`.
    pub fn ended_at(&self, sat: NodeId) -> &[usize] {
        self.end.get(&sat).map_or(&[], Vec::as_slice)
    }

    /// Ground routes sourced at `sat`.
    pub fn ground_from(&self, sat: NodeId) -> &[usize] {
        self.ground_start.get(&sat).map_or(&[], Vec::as_slice)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(NodeId, NodeId), &Vec<usize>)> {
        self.by_edge.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.by_edge.is_empty() && self.start.is_empty() && self.ground_start.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::WalkerStar;
    use std::collections::HashSet;

    fn reference() -> Topology<f64> {
        WalkerStar::reference().build().unwrap()
    }

    fn counts(h: usize) -> (usize, usize) {
        let r = enumerate_routes(&reference(), HopLimits::uniform(h), None).unwrap();
        (r.intersat.len(), r.ground.len())
    }

    #[test]
    fn zero_hops_enumerates_nothing() {
        assert_eq!(counts(0), (0, 0));
    }

    #[test]
    fn closed_form_counts_on_the_torus() {
        // the 6x5 torus has no triangles, so every non-backtracking walk of
        // length <= 3 is simple: 30*4*3^(h-1) paths; ground: 6 * (1 + 4 + 12)
        assert_eq!(counts(1), (120, 6));
        assert_eq!(counts(2), (120 + 360, 6 + 24));
        assert_eq!(counts(3), (120 + 360 + 1080, 6 + 24 + 72));
    }

    #[test]
    fn counts_are_monotone_in_each_limit() {
        let t = reference();
        let mut prev = 0;
        for hs in 0..=4 {
            for hg in 0..=4 {
                let n = enumerate_routes(
                    &t,
                    HopLimits {
                        intersat: hs,
                        ground: hg,
                    },
                    None,
                )
                .unwrap()
                .total();
                if hg > 0 {
                    let lower = enumerate_routes(
                        &t,
                        HopLimits {
                            intersat: hs,
                            ground: hg - 1,
                        },
                        None,
                    )
                    .unwrap()
                    .total();
                    assert!(n >= lower);
                }
                if hs > 0 {
                    let lower = enumerate_routes(
                        &t,
                        HopLimits {
                            intersat: hs - 1,
                            ground: hg,
                        },
                        None,
                    )
                    .unwrap()
                    .total();
                    assert!(n >= lower);
                }
                prev = prev.max(n);
            }
        }
        assert!(prev > 0);
    }

    #[test]
    fn enumerated_routes_are_valid_and_unique() {
        let t = reference();
        let hops = HopLimits {
            intersat: 3,
            ground: 2,
        };
        let r = enumerate_routes(&t, hops, None).unwrap();
        let mut seen = HashSet::new();
        for route in r.iter() {
            route.validate(&t, hops).unwrap();
            assert!(seen.insert(route.clone()));
        }
        assert!(r
            .intersat
            .iter()
            .all(|p| p.kind() == RouteKind::InterSatellite));
        assert!(r.ground.iter().all(|p| p.gateway().is_some()));
    }

    #[test]
    fn reversal_symmetry() {
        let r = enumerate_routes(&reference(), HopLimits::uniform(3), None).unwrap();
        let set: HashSet<&Route> = r.intersat.iter().collect();
        for p in &r.intersat {
            let mut v = p.vertices().to_vec();
            v.reverse();
            assert!(set.contains(&Route::inter_satellite(v)));
        }
    }

    #[test]
    fn ceiling_guard() {
        let err = enumerate_routes(&reference(), HopLimits::uniform(3), Some(100)).unwrap_err();
        assert!(matches!(err, Error::EnumerationCeiling { ceiling: 100 }));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate_routes(&reference(), HopLimits::uniform(2), None).unwrap();
        let b = enumerate_routes(&reference(), HopLimits::uniform(2), None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validation_rejects_bad_routes() {
        let t = reference();
        let hops = HopLimits::uniform(2);
        let bad = [
            Route::inter_satellite(vec![NodeId(1)]),
            Route::inter_satellite(vec![NodeId(1), NodeId(3)]),
            Route::inter_satellite(vec![NodeId(1), NodeId(2), NodeId(1)]),
            Route::inter_satellite(vec![NodeId(1), NodeId(2), NodeId(3), NodeId(4)]),
            Route::inter_satellite(vec![NodeId(1), NodeId(0)]),
            Route::ground(vec![NodeId(2), NodeId(0)]),
            Route::ground(vec![NodeId(3), NodeId(2), NodeId(1), NodeId(0)]),
            Route::ground(vec![NodeId(2), NodeId(1)]),
        ];
        for r in bad {
            assert!(r.validate(&t, hops).is_err(), "{r} should be invalid");
        }
        Route::ground(vec![NodeId(2), NodeId(1), NodeId(0)])
            .validate(&t, hops)
            .unwrap();
    }

    #[test]
    fn index_of_single_route() {
        let r = Route::inter_satellite(vec![NodeId(1), NodeId(2)]);
        let idx = build_route_index(std::slice::from_ref(&r));
        assert_eq!(idx.through(NodeId(2), NodeId(1)), &[0]);
        assert_eq!(idx.started_at(NodeId(1)), &[0]);
        assert_eq!(idx.ended_at(NodeId(2)), &[0]);
        assert!(idx.ground_from(NodeId(1)).is_empty());
        assert!(build_route_index(&[]).is_empty());
    }

    #[test]
    fn each_satellite_sources_four_one_hop_routes() {
        let r = enumerate_routes(&reference(), HopLimits::uniform(1), None).unwrap();
        let idx = build_route_index(&r.intersat);
        for s in reference().satellites() {
            assert_eq!(idx.started_at(s).len(), 4);
            assert_eq!(idx.ended_at(s).len(), 4);
        }
    }

    #[test]
    fn index_is_consistent_with_routes() {
        let r = enumerate_routes(&reference(), HopLimits::uniform(3), None).unwrap();
        let all: Vec<Route> = r.iter().cloned().collect();
        let idx = build_route_index(&all);
        let mut incidences = 0;
        for ((u, v), routes) in idx.edges() {
            for &p in routes {
                assert!(all[p].arcs().any(|(a, b)| edge_key(a, b) == (*u, *v)));
            }
            incidences += routes.len();
        }
        assert_eq!(incidences, all.iter().map(Route::hops).sum::<usize>());
    }
}
