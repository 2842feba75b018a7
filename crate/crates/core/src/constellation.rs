//! Walker-Star / +Grid constellation graph: satellites, the ground station,
//! inter-satellite links (ISLs) and satellite-to-ground links (SGLs).

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Vertex of the network graph. The ground station is node 0, satellites are 1..=N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const GROUND: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_ground(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_satellite(self) -> bool {
        self.0 != 0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Isl,
    Sgl,
}

/// How an ISL's capacity is shared between its two traversal directions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DuplexMode {
    /// Flows in both directions count against one capacity.
    #[default]
    Shared,
    /// Each direction has the full capacity.
    FullDuplex,
}

pub type EdgeId = usize;

/// Undirected link. Endpoints are stored with `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: LinkKind,
    pub capacity: T,
}

impl<T> Edge<T> {
    pub fn new(u: NodeId, v: NodeId, kind: LinkKind, capacity: T) -> Self {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        Edge {
            a,
            b,
            kind,
            capacity,
        }
    }

    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }

    /// 0 when traversed from the lower endpoint, 1 otherwise.
    #[inline]
    pub fn direction_from(&self, from: NodeId) -> usize {
        usize::from(from != self.a)
    }
}

/// Immutable network graph.
#[derive(Clone, Debug)]
pub struct Topology<T> {
    planes: usize,
    sats_per_plane: usize,
    seam_wrap: bool,
    duplex: DuplexMode,
    num_satellites: usize,
    /// ISLs occupy `0..num_isl`, SGLs follow.
    edges: Vec<Edge<T>>,
    num_isl: usize,
    gateways: Vec<NodeId>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    lookup: HashMap<(NodeId, NodeId), EdgeId>,
}

impl<T: Scalar> Topology<T> {
    /// Assembles a topology from an explicit edge list.
    ///
    /// Only structural errors (unknown endpoints, self loops, duplicate edges,
    /// non-finite capacities) are rejected here; the modelling invariants are
    /// reported by [`validate_topology`].
    pub fn from_parts(
        planes: usize,
        sats_per_plane: usize,
        num_satellites: usize,
        seam_wrap: bool,
        duplex: DuplexMode,
        edges: Vec<Edge<T>>,
    ) -> Result<Self> {
        let mut edges: Vec<Edge<T>> = edges
            .into_iter()
            .map(|e| Edge::new(e.a, e.b, e.kind, e.capacity))
            .collect();
        // stable: ISLs first, original order otherwise
        edges.sort_by_key(|e| e.kind == LinkKind::Sgl);
        let num_isl = edges.iter().take_while(|e| e.kind == LinkKind::Isl).count();

        let num_nodes = num_satellites + 1;
        let mut adjacency = vec![Vec::new(); num_nodes];
        let mut lookup = HashMap::with_capacity(edges.len());
        for (id, e) in edges.iter().enumerate() {
            for n in [e.a, e.b] {
                if n.index() >= num_nodes {
                    return Err(Error::MalformedTopology(format!(
                        "edge {}-{} references node {} beyond {} satellites",
                        e.a, e.b, n, num_satellites
                    )));
                }
            }
            if e.a == e.b {
                return Err(Error::MalformedTopology(format!(
                    "self loop at node {}",
                    e.a
                )));
            }
            if !e.capacity.is_finite() {
                return Err(Error::MalformedTopology(format!(
                    "edge {}-{} has non-finite capacity",
                    e.a, e.b
                )));
            }
            if lookup.insert((e.a, e.b), id).is_some() {
                return Err(Error::MalformedTopology(format!(
                    "duplicate edge {}-{}",
                    e.a, e.b
                )));
            }
            adjacency[e.a.index()].push((e.b, id));
            adjacency[e.b.index()].push((e.a, id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let mut gateways: Vec<NodeId> = edges[num_isl..]
            .iter()
            .flat_map(|e| [e.a, e.b])
            .filter(|n| n.is_satellite())
            .collect();
        gateways.sort_unstable();

        Ok(Topology {
            planes,
            sats_per_plane,
            seam_wrap,
            duplex,
            num_satellites,
            edges,
            num_isl,
            gateways,
            adjacency,
            lookup,
        })
    }

    /// Same graph with a different ISL duplex mode.
    pub fn with_duplex(mut self, duplex: DuplexMode) -> Self {
        self.duplex = duplex;
        self
    }
}

impl<T> Topology<T> {
    pub fn planes(&self) -> usize {
        self.planes
    }

    pub fn sats_per_plane(&self) -> usize {
        self.sats_per_plane
    }

    pub fn seam_wrap(&self) -> bool {
        self.seam_wrap
    }

    pub fn duplex(&self) -> DuplexMode {
        self.duplex
    }

    pub fn num_satellites(&self) -> usize {
        self.num_satellites
    }

    pub fn num_nodes(&self) -> usize {
        self.num_satellites + 1
    }

    pub fn satellites(&self) -> impl Iterator<Item = NodeId> + '_ {
        (1..=self.num_satellites as u32).map(NodeId)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.index() <= self.num_satellites
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge<T> {
        &self.edges[id]
    }

    pub fn isl_edges(&self) -> &[Edge<T>] {
        &self.edges[..self.num_isl]
    }

    pub fn sgl_edges(&self) -> &[Edge<T>] {
        &self.edges[self.num_isl..]
    }

    pub fn num_isl(&self) -> usize {
        self.num_isl
    }

    pub fn num_sgl(&self) -> usize {
        self.edges.len() - self.num_isl
    }

    pub fn gateways(&self) -> &[NodeId] {
        &self.gateways
    }

    /// Direction-free edge lookup.
    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.lookup.get(&key).copied()
    }

    /// SGL edge of a gateway satellite.
    pub fn sgl_of(&self, gateway: NodeId) -> Option<EdgeId> {
        self.edge_between(gateway, NodeId::GROUND)
            .filter(|&e| self.edges[e].kind == LinkKind::Sgl)
    }

    /// Position of an SGL among the SGL edges.
    pub fn sgl_slot(&self, edge: EdgeId) -> usize {
        debug_assert!(edge >= self.num_isl);
        edge - self.num_isl
    }

    /// Neighbours in ascending index order, with the connecting edge.
    pub fn neighbors(&self, node: NodeId) -> Result<&[(NodeId, EdgeId)]> {
        self.adjacency
            .get(node.index())
            .map(Vec::as_slice)
            .ok_or(Error::UnknownNode(node))
    }

    /// ISL neighbours of a satellite, ascending.
    pub fn isl_neighbors(&self, node: NodeId) -> impl Iterator<Item = (NodeId, EdgeId)> + '_ {
        self.adjacency
            .get(node.index())
            .into_iter()
            .flatten()
            .copied()
            .filter(move |&(_, e)| e < self.num_isl)
    }

    /// Number of ISL capacity rows: one per edge when shared, one per direction otherwise.
    pub fn isl_row_count(&self) -> usize {
        match self.duplex {
            DuplexMode::Shared => self.num_isl,
            DuplexMode::FullDuplex => 2 * self.num_isl,
        }
    }

    /// Capacity row used when traversing ISL `edge` starting at `from`.
    #[inline]
    pub fn isl_row(&self, edge: EdgeId, from: NodeId) -> usize {
        match self.duplex {
            DuplexMode::Shared => edge,
            DuplexMode::FullDuplex => 2 * edge + self.edges[edge].direction_from(from),
        }
    }

    /// `(plane, slot)` of a satellite in a regular Walker grid.
    pub fn plane_slot(&self, node: NodeId) -> Option<(usize, usize)> {
        if node.is_ground()
            || node.index() > self.num_satellites
            || self.planes * self.sats_per_plane != self.num_satellites
            || self.sats_per_plane == 0
        {
            return None;
        }
        let i = node.index() - 1;
        Some((i / self.sats_per_plane, i % self.sats_per_plane))
    }
}

impl<T: PartialEq> PartialEq for Topology<T> {
    fn eq(&self, other: &Self) -> bool {
        self.planes == other.planes
            && self.sats_per_plane == other.sats_per_plane
            && self.seam_wrap == other.seam_wrap
            && self.duplex == other.duplex
            && self.num_satellites == other.num_satellites
            && self.edges == other.edges
    }
}

/// Parameters of a Walker-Star constellation modelled as a +Grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkerStar<T> {
    pub planes: usize,
    pub sats_per_plane: usize,
    /// In-plane slot of the one gateway satellite of every plane.
    pub gateway_phase: usize,
    #[serde(default = "default_true")]
    pub seam_wrap: bool,
    pub isl_capacity: T,
    pub sgl_capacity: T,
    #[serde(default)]
    pub duplex: DuplexMode,
}

fn default_true() -> bool {
    true
}

impl<T: Scalar> WalkerStar<T> {
    /// 6 planes x 5 satellites, torus wrap, gateways at phase 0, 5/1 Gbit links.
    pub fn reference() -> Self {
        WalkerStar {
            planes: 6,
            sats_per_plane: 5,
            gateway_phase: 0,
            seam_wrap: true,
            isl_capacity: T::lit(5.0),
            sgl_capacity: T::lit(1.0),
            duplex: DuplexMode::Shared,
        }
    }

    pub fn build(&self) -> Result<Topology<T>> {
        build_walker_star(self)
    }
}

/// Satellite `(plane, slot)` as a node id.
#[inline]
pub fn walker_node(sats_per_plane: usize, plane: usize, slot: usize) -> NodeId {
    NodeId((1 + plane * sats_per_plane + slot) as u32)
}

/// Builds the +Grid: satellite `(p, k)` links to `(p, k±1 mod K)` and
/// `(p±1, k)` (plane index wrapped iff `seam_wrap`); one gateway per plane.
pub fn build_walker_star<T: Scalar>(params: &WalkerStar<T>) -> Result<Topology<T>> {
    let &WalkerStar {
        planes,
        sats_per_plane: k_count,
        gateway_phase,
        seam_wrap,
        isl_capacity,
        sgl_capacity,
        duplex,
    } = params;
    if planes < 3 {
        return Err(Error::DimensionTooSmall {
            what: "planes",
            value: planes,
            min: 3,
        });
    }
    if k_count < 3 {
        return Err(Error::DimensionTooSmall {
            what: "sats_per_plane",
            value: k_count,
            min: 3,
        });
    }
    if gateway_phase >= k_count {
        return Err(Error::InvalidGatewayPhase {
            phase: gateway_phase,
            sats_per_plane: k_count,
        });
    }
    if !(isl_capacity > T::zero()) || !(sgl_capacity > T::zero()) {
        return Err(Error::InvalidParameter(
            "link capacities must be positive".into(),
        ));
    }

    let node = |p: usize, k: usize| walker_node(k_count, p, k);
    let mut edges = Vec::with_capacity(2 * planes * k_count + planes);
    for p in 0..planes {
        for k in 0..k_count {
            edges.push(Edge::new(
                node(p, k),
                node(p, (k + 1) % k_count),
                LinkKind::Isl,
                isl_capacity,
            ));
            if seam_wrap || p + 1 < planes {
                edges.push(Edge::new(
                    node(p, k),
                    node((p + 1) % planes, k),
                    LinkKind::Isl,
                    isl_capacity,
                ));
            }
        }
    }
    for p in 0..planes {
        edges.push(Edge::new(
            node(p, gateway_phase),
            NodeId::GROUND,
            LinkKind::Sgl,
            sgl_capacity,
        ));
    }
    Topology::from_parts(planes, k_count, planes * k_count, seam_wrap, duplex, edges)
}

/// One broken topology invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    SglEndpointNotGround { a: NodeId, b: NodeId },
    IslTouchesGround { a: NodeId, b: NodeId },
    NonPositiveCapacity { a: NodeId, b: NodeId },
    IslDisconnected,
    IslDegree { node: NodeId, degree: usize },
    GatewayCountMismatch { gateways: usize, sgl_edges: usize },
    GatewayNotSatellite(NodeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SglEndpointNotGround { a, b } => {
                write!(f, "SGL endpoint must be ground (edge {a}-{b})")
            }
            Violation::IslTouchesGround { a, b } => {
                write!(f, "ISL endpoints must be satellites (edge {a}-{b})")
            }
            Violation::NonPositiveCapacity { a, b } => {
                write!(f, "capacity must be positive (edge {a}-{b})")
            }
            Violation::IslDisconnected => write!(f, "ISL graph connected"),
            Violation::IslDegree { node, degree } => {
                write!(
                    f,
                    "ISL degree must be 4 with seam wrap (node {node} has {degree})"
                )
            }
            Violation::GatewayCountMismatch {
                gateways,
                sgl_edges,
            } => write!(
                f,
                "gateway count must equal SGL count ({gateways} gateways, {sgl_edges} SGLs)"
            ),
            Violation::GatewayNotSatellite(n) => write!(f, "gateway must be a satellite ({n})"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every topology invariant and lists the violated ones.
pub fn validate_topology<T: Scalar>(topology: &Topology<T>) -> ValidationReport {
    let mut violations = Vec::new();

    for e in topology.edges() {
        if !(e.capacity > T::zero()) {
            violations.push(Violation::NonPositiveCapacity { a: e.a, b: e.b });
        }
        match e.kind {
            LinkKind::Isl if e.a.is_ground() || e.b.is_ground() => {
                violations.push(Violation::IslTouchesGround { a: e.a, b: e.b });
            }
            LinkKind::Sgl if !(e.a.is_ground() ^ e.b.is_ground()) => {
                violations.push(Violation::SglEndpointNotGround { a: e.a, b: e.b });
            }
            _ => {}
        }
    }

    let gateways = topology.gateways();
    if let Some(&g) = gateways.iter().find(|g| g.is_ground()) {
        violations.push(Violation::GatewayNotSatellite(g));
    }
    let mut distinct = gateways.to_vec();
    distinct.dedup();
    if distinct.len() != topology.num_sgl() {
        violations.push(Violation::GatewayCountMismatch {
            gateways: distinct.len(),
            sgl_edges: topology.num_sgl(),
        });
    }

    if topology.num_satellites() > 0 {
        let mut seen = vec![false; topology.num_nodes()];
        let mut queue = VecDeque::from([NodeId(1)]);
        seen[1] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for (u, e) in topology.isl_neighbors(v) {
                let edge = topology.edge(e);
                if edge.a.is_ground() || edge.b.is_ground() {
                    continue;
                }
                if !seen[u.index()] {
                    seen[u.index()] = true;
                    reached += 1;
                    queue.push_back(u);
                }
            }
        }
        if reached != topology.num_satellites() {
            violations.push(Violation::IslDisconnected);
        }
    }

    if topology.seam_wrap() {
        for s in topology.satellites() {
            let degree = topology.isl_neighbors(s).count();
            if degree != 4 {
                violations.push(Violation::IslDegree { node: s, degree });
            }
        }
    }

    ValidationReport { violations }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: NodeId,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Ground,
    Satellite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry<T> {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: LinkKind,
    pub capacity: T,
}

/// JSON form of a [`Topology`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyDocument<T> {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub seam_wrap: bool,
    #[serde(default)]
    pub duplex_mode: DuplexMode,
    pub nodes: Vec<NodeEntry>,
    pub edges: Vec<EdgeEntry<T>>,
    pub gateways: Vec<NodeId>,
}

impl<T: Scalar> Topology<T> {
    pub fn to_document(&self) -> TopologyDocument<T> {
        let mut nodes = vec![NodeEntry {
            id: NodeId::GROUND,
            kind: NodeKind::Ground,
            plane: None,
            slot: None,
        }];
        nodes.extend(self.satellites().map(|id| {
            let ps = self.plane_slot(id);
            NodeEntry {
                id,
                kind: NodeKind::Satellite,
                plane: ps.map(|p| p.0),
                slot: ps.map(|p| p.1),
            }
        }));
        TopologyDocument {
            planes: self.planes,
            sats_per_plane: self.sats_per_plane,
            seam_wrap: self.seam_wrap,
            duplex_mode: self.duplex,
            nodes,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    a: e.a,
                    b: e.b,
                    kind: e.kind,
                    capacity: e.capacity,
                })
                .collect(),
            gateways: self.gateways.clone(),
        }
    }

    pub fn from_document(doc: &TopologyDocument<T>) -> Result<Self> {
        let mut ids: Vec<NodeId> = doc.nodes.iter().map(|n| n.id).collect();
        ids.sort_unstable();
        let contiguous = ids.iter().enumerate().all(|(i, id)| id.index() == i);
        if !contiguous || ids.is_empty() {
            return Err(Error::MalformedTopology(
                "node ids must be exactly 0..=N with 0 the ground station".into(),
            ));
        }
        for n in &doc.nodes {
            let expected = if n.id.is_ground() {
                NodeKind::Ground
            } else {
                NodeKind::Satellite
            };
            if n.kind != expected {
                return Err(Error::MalformedTopology(format!(
                    "node {} must be of kind {:?}",
                    n.id, expected
                )));
            }
        }
        let edges = doc
            .edges
            .iter()
            .map(|e| Edge::new(e.a, e.b, e.kind, e.capacity))
            .collect();
        let topo = Topology::from_parts(
            doc.planes,
            doc.sats_per_plane,
            ids.len() - 1,
            doc.seam_wrap,
            doc.duplex_mode,
            edges,
        )?;
        let mut listed = doc.gateways.clone();
        listed.sort_unstable();
        if listed != topo.gateways {
            return Err(Error::MalformedTopology(
                "gateway list does not match the SGL edges".into(),
            ));
        }
        Ok(topo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> Topology<f64> {
        WalkerStar::reference().build().unwrap()
    }

    #[test]
    fn reference_counts() {
        let t = reference();
        assert_eq!(t.num_satellites(), 30);
        assert_eq!(t.gateways().len(), 6);
        assert_eq!(t.num_isl(), 60);
        assert_eq!(t.num_sgl(), 6);
        assert!(validate_topology(&t).is_ok());
    }

    #[test]
    fn small_torus_is_four_regular() {
        let mut p = WalkerStar::<f64>::reference();
        p.planes = 3;
        p.sats_per_plane = 3;
        let t = p.build().unwrap();
        for s in t.satellites() {
            assert_eq!(t.isl_neighbors(s).count(), 4);
        }
    }

    #[test]
    fn neighbors_of_ground_are_gateways() {
        let t = reference();
        let n: Vec<NodeId> = t
            .neighbors(NodeId::GROUND)
            .unwrap()
            .iter()
            .map(|x| x.0)
            .collect();
        assert_eq!(n, t.gateways());
        assert_eq!(n, [1, 6, 11, 16, 21, 26].map(NodeId));
        assert!(matches!(
            t.neighbors(NodeId(31)),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn neighbors_are_sorted_and_include_sgl_for_gateways() {
        let t = reference();
        let n: Vec<u32> = t
            .neighbors(NodeId(1))
            .unwrap()
            .iter()
            .map(|x| x.0 .0)
            .collect();
        // (0,0): in-plane 2 and 5, cross-plane 6 and 26, plus the SGL
        assert_eq!(n, vec![0, 2, 5, 6, 26]);
        assert_eq!(t.neighbors(NodeId(2)).unwrap().len(), 4);
    }

    #[test]
    fn edge_lookup_is_direction_free() {
        let t = reference();
        assert_eq!(
            t.edge_between(NodeId(1), NodeId(2)),
            t.edge_between(NodeId(2), NodeId(1))
        );
        assert!(t.edge_between(NodeId(1), NodeId(3)).is_none());
        assert!(t.sgl_of(NodeId(6)).is_some());
        assert!(t.sgl_of(NodeId(7)).is_none());
    }

    #[test]
    fn rejects_bad_dimensions() {
        let mut p = WalkerStar::<f64>::reference();
        p.planes = 2;
        assert!(matches!(p.build(), Err(Error::DimensionTooSmall { .. })));
        let mut p = WalkerStar::<f64>::reference();
        p.sats_per_plane = 2;
        assert!(matches!(p.build(), Err(Error::DimensionTooSmall { .. })));
        let mut p = WalkerStar::<f64>::reference();
        p.gateway_phase = 5;
        assert!(matches!(p.build(), Err(Error::InvalidGatewayPhase { .. })));
    }

    #[test]
    fn open_seam_has_fewer_links() {
        let mut p = WalkerStar::<f64>::reference();
        p.seam_wrap = false;
        let t = p.build().unwrap();
        assert_eq!(t.num_isl(), 55);
        let report = validate_topology(&t);
        assert!(report.is_ok(), "{:?}", report);
    }

    #[test]
    fn sgl_between_satellites_is_reported() {
        let edges = vec![
            Edge::new(NodeId(1), NodeId(2), LinkKind::Isl, 5.0),
            Edge::new(NodeId(1), NodeId(2), LinkKind::Sgl, 1.0),
        ];
        // duplicate endpoints are a structural error, so use a distinct pair
        assert!(Topology::from_parts(0, 0, 2, false, DuplexMode::Shared, edges).is_err());
        let edges = vec![
            Edge::new(NodeId(1), NodeId(2), LinkKind::Isl, 5.0),
            Edge::new(NodeId(2), NodeId(3), LinkKind::Isl, 5.0),
            Edge::new(NodeId(1), NodeId(3), LinkKind::Sgl, 1.0),
        ];
        let t = Topology::from_parts(0, 0, 3, false, DuplexMode::Shared, edges).unwrap();
        let report = validate_topology(&t);
        assert!(report
            .violations
            .iter()
            .any(|v| v.to_string().starts_with("SGL endpoint must be ground")));
    }

    #[test]
    fn disconnected_isl_graph_is_reported() {
        let edges = vec![
            Edge::new(NodeId(1), NodeId(2), LinkKind::Isl, 5.0),
            Edge::new(NodeId(3), NodeId(4), LinkKind::Isl, 5.0),
            Edge::new(NodeId(1), NodeId(0), LinkKind::Sgl, 1.0),
        ];
        let t = Topology::from_parts(0, 0, 4, false, DuplexMode::Shared, edges).unwrap();
        let report = validate_topology(&t);
        assert_eq!(report.violations, vec![Violation::IslDisconnected]);
        assert_eq!(report.violations[0].to_string(), "ISL graph connected");
    }

    #[test]
    fn full_duplex_rows_split_by_direction() {
        let t = reference().with_duplex(DuplexMode::FullDuplex);
        let e = t.edge_between(NodeId(1), NodeId(2)).unwrap();
        assert_eq!(t.isl_row_count(), 120);
        assert_ne!(t.isl_row(e, NodeId(1)), t.isl_row(e, NodeId(2)));
        let shared = reference();
        assert_eq!(shared.isl_row(e, NodeId(1)), shared.isl_row(e, NodeId(2)));
    }

    #[test]
    fn document_round_trip() {
        let t = reference();
        let doc = t.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: TopologyDocument<f64> = serde_json::from_str(&json).unwrap();
        let t2 = Topology::from_document(&back).unwrap();
        assert_eq!(t2.edges(), t.edges());
        assert_eq!(t2.gateways(), t.gateways());
        assert_eq!(t2.to_document(), doc);
    }

    #[test]
    fn construction_is_deterministic() {
        assert_eq!(reference().to_document(), reference().to_document());
    }
}
