//! Navigation graph over face corners and face centers.
//!
//! Every edge keeps the set of obstacles currently blocking it; an edge is
//! clear exactly when that set is empty. Edge traversal cost is the natural
//! (Euclidean) length, multiplied by the preference penalty when the entered
//! vertex is outside a non-empty preference set. Penalties are never below 1,
//! so the Euclidean heuristic stays admissible for A*.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{distance, segment_intersects_box, Aabb, Point, Segment};
use crate::navmesh::{FaceId, NavMesh};

pub const DEFAULT_PENALTY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObstacleId(pub String);

impl ObstacleId {
    pub fn new(id: impl Into<String>) -> Self {
        ObstacleId(id.into())
    }
}

impl fmt::Display for ObstacleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NavGraphError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("obstacle {0} is already registered")]
    DuplicateObstacleId(ObstacleId),
    #[error("unknown obstacle {0}")]
    UnknownObstacle(ObstacleId),
    #[error("no edge between {0} and {1}")]
    NoSuchEdge(VertexId, VertexId),
    #[error("preference penalty must be >= 1, got {0}")]
    InvalidPenalty(f64),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("invalid edge ({0}, {1}): {2}")]
    InvalidEdge(usize, usize, &'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Corner,
    Center,
}

/// Where a vertex came from in the source mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    MeshVertex(usize),
    Face(FaceId),
    Synthetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: VertexId,
    pub position: Point,
    pub kind: VertexKind,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub natural_length: f64,
    /// Corner-corner edge lying on the walkable boundary, with its endpoints in
    /// the winding order of the owning face.
    pub border: Option<(VertexId, VertexId)>,
    pub blockers: BTreeSet<ObstacleId>,
}

impl Edge {
    pub fn is_clear(&self) -> bool {
        self.blockers.is_empty()
    }

    pub fn is_border(&self) -> bool {
        self.border.is_some()
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    pub id: ObstacleId,
    pub bounds: Aabb,
    pub blocking: bool,
}

impl Obstacle {
    pub fn new(id: impl Into<String>, bounds: Aabb, blocking: bool) -> Self {
        Obstacle { id: ObstacleId::new(id), bounds, blocking }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NavGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    /// Per vertex: `(neighbor, edge index)`, sorted by neighbor.
    adjacency: Vec<Vec<(VertexId, usize)>>,
    prefs: BTreeSet<VertexId>,
    penalty: f64,
    obstacles: BTreeMap<ObstacleId, Obstacle>,
}

/// Corners of the referenced mesh vertices, then one center per face, with
/// corner-corner, center-center (adjacent faces) and center-corner edges.
pub fn build_navgraph(mesh: &NavMesh) -> NavGraph {
    let referenced = mesh.referenced_vertices();
    let mut corner_of = vec![usize::MAX; mesh.vertices().len()];
    let mut vertices = Vec::with_capacity(referenced.len() + mesh.face_count());
    for &mv in &referenced {
        corner_of[mv] = vertices.len();
        vertices.push((mesh.vertices()[mv], VertexKind::Corner, Provenance::MeshVertex(mv)));
    }
    let center_base = vertices.len();
    for f in 0..mesh.face_count() {
        vertices.push((mesh.face_center(f).unwrap(), VertexKind::Center, Provenance::Face(f)));
    }

    let mut edges = Vec::new();
    let mut border = Vec::new();
    for e in mesh.edges() {
        edges.push((corner_of[e.a], corner_of[e.b]));
        border.push(e.is_border().then(|| {
            (VertexId(corner_of[e.wound.0]), VertexId(corner_of[e.wound.1]))
        }));
    }
    for e in mesh.edges() {
        if let [f, g] = e.faces[..] {
            edges.push((center_base + f, center_base + g));
            border.push(None);
        }
    }
    for (f, tri) in mesh.faces().iter().enumerate() {
        for &mv in tri {
            edges.push((center_base + f, corner_of[mv]));
            border.push(None);
        }
    }
    let mut g = NavGraph::from_parts(vertices, &edges).expect("mesh-derived graph is well formed");
    for (e, b) in g.edges.iter_mut().zip(border) {
        e.border = b;
    }
    g
}

impl NavGraph {
    /// Assemble a graph from explicit vertices and undirected edges. Edge
    /// lengths are the Euclidean distances between endpoints.
    pub fn from_parts(
        vertices: Vec<(Point, VertexKind, Provenance)>,
        edges: &[(usize, usize)],
    ) -> Result<Self, NavGraphError> {
        let n = vertices.len();
        let vertices: Vec<Vertex> = vertices
            .into_iter()
            .enumerate()
            .map(|(i, (position, kind, provenance))| Vertex { id: VertexId(i), position, kind, provenance })
            .collect();
        let mut adjacency = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(NavGraphError::InvalidEdge(a, b, "endpoint out of range"));
            }
            if a == b {
                return Err(NavGraphError::InvalidEdge(a, b, "self-loop"));
            }
            let (a, b) = (a.min(b), a.max(b));
            let idx = out.len();
            adjacency[a].push((VertexId(b), idx));
            adjacency[b].push((VertexId(a), idx));
            out.push(Edge {
                a: VertexId(a),
                b: VertexId(b),
                natural_length: distance(vertices[a].position, vertices[b].position),
                border: None,
                blockers: BTreeSet::new(),
            });
        }
        for (v, adj) in adjacency.iter_mut().enumerate() {
            adj.sort_unstable();
            if adj.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(NavGraphError::InvalidEdge(v, v, "duplicate edge"));
            }
        }
        Ok(NavGraph {
            vertices,
            edges: out,
            adjacency,
            prefs: BTreeSet::new(),
            penalty: DEFAULT_PENALTY,
            obstacles: BTreeMap::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> Result<&Vertex, NavGraphError> {
        self.vertices.get(v.0).ok_or(NavGraphError::UnknownVertex(v))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.vertices.len()
    }

    pub fn position(&self, v: VertexId) -> Point {
        self.vertices[v.0].position
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with the connecting edge, in ascending neighbor order.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, &Edge)> + '_ {
        self.adjacency[v.0].iter().map(move |&(w, e)| (w, &self.edges[e]))
    }

    pub fn edge(&self, a: VertexId, b: VertexId) -> Option<&Edge> {
        let adj = self.adjacency.get(a.0)?;
        adj.binary_search_by_key(&b, |&(w, _)| w).ok().map(|i| &self.edges[adj[i].1])
    }

    pub fn preferences(&self) -> &BTreeSet<VertexId> {
        &self.prefs
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn obstacles(&self) -> impl Iterator<Item = &Obstacle> {
        self.obstacles.values()
    }

    pub fn obstacle(&self, id: &ObstacleId) -> Option<&Obstacle> {
        self.obstacles.get(id)
    }

    /// Vertex closest to `p`; ties go to the smaller id.
    pub fn nearest_vertex(&self, p: Point) -> Result<VertexId, NavGraphError> {
        self.vertices
            .iter()
            .map(|v| (distance(v.position, p), v.id))
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
            .map(|(_, id)| id)
            .ok_or(NavGraphError::EmptyGraph)
    }

    fn segment(&self, e: &Edge) -> Segment {
        Segment::new(self.position(e.a), self.position(e.b))
    }

    pub fn add_obstacle(&mut self, obstacle: Obstacle) -> Result<(), NavGraphError> {
        if self.obstacles.contains_key(&obstacle.id) {
            return Err(NavGraphError::DuplicateObstacleId(obstacle.id));
        }
        if obstacle.blocking {
            self.apply_blocker(&obstacle.id, &obstacle.bounds, true);
        }
        self.obstacles.insert(obstacle.id.clone(), obstacle);
        Ok(())
    }

    pub fn set_obstacle_blocking(&mut self, id: &ObstacleId, blocking: bool) -> Result<(), NavGraphError> {
        let obstacle = self
            .obstacles
            .get_mut(id)
            .ok_or_else(|| NavGraphError::UnknownObstacle(id.clone()))?;
        if obstacle.blocking == blocking {
            return Ok(());
        }
        obstacle.blocking = blocking;
        let bounds = obstacle.bounds;
        self.apply_blocker(id, &bounds, blocking);
        Ok(())
    }

    fn apply_blocker(&mut self, id: &ObstacleId, bounds: &Aabb, blocking: bool) {
        for i in 0..self.edges.len() {
            if segment_intersects_box(&self.segment(&self.edges[i]), bounds) {
                let blockers = &mut self.edges[i].blockers;
                if blocking {
                    blockers.insert(id.clone());
                } else {
                    blockers.remove(id);
                }
            }
        }
    }

    pub fn is_clear(&self, a: VertexId, b: VertexId) -> Result<bool, NavGraphError> {
        self.edge(a, b).map(Edge::is_clear).ok_or(NavGraphError::NoSuchEdge(a, b))
    }

    /// True when the straight segment intersects no blocking obstacle.
    pub fn segment_is_clear(&self, s: &Segment) -> bool {
        self.obstacles
            .values()
            .filter(|o| o.blocking)
            .all(|o| !segment_intersects_box(s, &o.bounds))
    }

    /// Cost of moving from `from` into `to` along their edge.
    pub fn effective_cost(&self, from: VertexId, to: VertexId) -> Result<f64, NavGraphError> {
        let e = self.edge(from, to).ok_or(NavGraphError::NoSuchEdge(from, to))?;
        Ok(self.shaped(e.natural_length, to))
    }

    pub(crate) fn shaped(&self, length: f64, to: VertexId) -> f64 {
        if self.prefs.is_empty() || self.prefs.contains(&to) {
            length
        } else {
            length * self.penalty
        }
    }

    pub fn set_preferences(
        &mut self,
        prefs: BTreeSet<VertexId>,
        penalty: f64,
    ) -> Result<(), NavGraphError> {
        if !(penalty >= 1.0) || !penalty.is_finite() {
            return Err(NavGraphError::InvalidPenalty(penalty));
        }
        if let Some(&v) = prefs.iter().find(|v| !self.contains(**v)) {
            return Err(NavGraphError::UnknownVertex(v));
        }
        self.prefs = prefs;
        self.penalty = penalty;
        Ok(())
    }

    pub fn clear_preferences(&mut self) {
        self.prefs.clear();
    }

    pub fn center_vertices(&self) -> BTreeSet<VertexId> {
        self.vertices
            .iter()
            .filter(|v| v.kind == VertexKind::Center)
            .map(|v| v.id)
            .collect()
    }

    /// Endpoints of border edges.
    pub fn border_vertices(&self) -> BTreeSet<VertexId> {
        self.edges
            .iter()
            .filter(|e| e.is_border())
            .flat_map(|e| [e.a, e.b])
            .collect()
    }

    pub fn to_export(&self) -> GraphExport {
        GraphExport {
            vertices: self
                .vertices
                .iter()
                .map(|v| ExportVertex { id: v.id, pos: v.position, kind: v.kind })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| ExportEdge { a: e.a, b: e.b, length: e.natural_length, clear: e.is_clear() })
                .collect(),
        }
    }
}

/// JSON export shape of a navgraph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphExport {
    pub vertices: Vec<ExportVertex>,
    pub edges: Vec<ExportEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportVertex {
    pub id: VertexId,
    pub pos: Point,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportEdge {
    pub a: VertexId,
    pub b: VertexId,
    pub length: f64,
    pub clear: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::navmesh::{load_mesh, RawMesh};

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    fn square_graph() -> NavGraph {
        let raw = RawMesh {
            vertices: vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(1.0, 0.0, 1.0), p(0.0, 0.0, 1.0)],
            faces: vec![vec![0, 1, 2, 3]],
        };
        build_navgraph(&load_mesh(&raw).unwrap())
    }

    fn components(g: &NavGraph) -> usize {
        let mut seen = vec![false; g.vertex_count()];
        let mut count = 0;
        for s in 0..g.vertex_count() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![VertexId(s)];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for (w, _) in g.neighbors(v) {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    #[test]
    fn two_triangle_square_counts() {
        let g = square_graph();
        assert_eq!(g.vertex_count(), 6);
        let corners = g.vertices().iter().filter(|v| v.kind == VertexKind::Corner).count();
        assert_eq!(corners, 4);
        assert_eq!(g.edges().len(), 12);
        let cc = g
            .edges()
            .iter()
            .filter(|e| g.vertex(e.a).unwrap().kind == VertexKind::Corner && g.vertex(e.b).unwrap().kind == VertexKind::Corner)
            .count();
        assert_eq!(cc, 5);
        assert_eq!(g.edges().iter().filter(|e| e.is_border()).count(), 4);
        assert!(g.edges().iter().all(Edge::is_clear));
        assert!(g.preferences().is_empty());
        assert_eq!(g.penalty(), DEFAULT_PENALTY);
    }

    #[test]
    fn single_and_disjoint_triangles() {
        let tri = RawMesh {
            vertices: vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 0.0, 1.0)],
            faces: vec![vec![0, 1, 2]],
        };
        let g = build_navgraph(&load_mesh(&tri).unwrap());
        assert_eq!((g.vertex_count(), g.edges().len()), (4, 6));

        let two = RawMesh {
            vertices: vec![
                p(0.0, 0.0, 0.0),
                p(1.0, 0.0, 0.0),
                p(0.0, 0.0, 1.0),
                p(5.0, 0.0, 0.0),
                p(6.0, 0.0, 0.0),
                p(5.0, 0.0, 1.0),
            ],
            faces: vec![vec![0, 1, 2], vec![3, 4, 5]],
        };
        let g = build_navgraph(&load_mesh(&two).unwrap());
        assert_eq!((g.vertex_count(), g.edges().len()), (8, 12));
        assert_eq!(components(&g), 2);
    }

    #[test]
    fn center_degrees_match_face_structure() {
        let g = square_graph();
        for v in g.vertices().iter().filter(|v| v.kind == VertexKind::Center) {
            let degree = g.neighbors(v.id).count();
            let centers = g
                .neighbors(v.id)
                .filter(|(w, _)| g.vertex(*w).unwrap().kind == VertexKind::Center)
                .count();
            assert!(degree >= 3);
            assert_eq!(centers, 1);
        }
    }

    #[test]
    fn nearest_vertex_rules() {
        let g = square_graph();
        assert_eq!(g.nearest_vertex(p(1.0, 0.0, 1.0)).unwrap(), VertexId(2));
        let c = g.position(VertexId(5));
        assert_eq!(g.nearest_vertex(c).unwrap(), VertexId(5));
        // Equidistant from corners 0 and 1.
        assert_eq!(g.nearest_vertex(p(0.5, 0.0, -3.0)).unwrap(), VertexId(0));
        let empty = NavGraph::from_parts(vec![], &[]).unwrap();
        assert_eq!(empty.nearest_vertex(Point::ORIGIN), Err(NavGraphError::EmptyGraph));
    }

    #[test]
    fn obstacle_blocks_only_intersecting_edges() {
        let mut g = square_graph();
        // Straddles the midpoint of the bottom rim edge (0,1) only.
        let b = Aabb::new(p(0.5, 0.0, 0.0), p(0.05, 0.5, 0.04));
        g.add_obstacle(Obstacle::new("fence", b, true)).unwrap();
        let blocked: Vec<_> = g.edges().iter().filter(|e| !e.is_clear()).map(|e| (e.a, e.b)).collect();
        assert_eq!(blocked, vec![(VertexId(0), VertexId(1))]);
        assert_eq!(
            g.add_obstacle(Obstacle::new("fence", b, true)),
            Err(NavGraphError::DuplicateObstacleId(ObstacleId::new("fence")))
        );

        let mut h = square_graph();
        h.add_obstacle(Obstacle::new("fence", b, false)).unwrap();
        assert!(h.edges().iter().all(Edge::is_clear));
        assert!(h.obstacle(&ObstacleId::new("fence")).is_some());
    }

    #[test]
    fn toggling_is_an_involution_and_idempotent() {
        let mut g = square_graph();
        let before = g.clone();
        let b = Aabb::new(p(0.5, 0.0, 0.5), p(0.1, 0.1, 0.1));
        g.add_obstacle(Obstacle::new("door", b, false)).unwrap();
        let registered = g.clone();
        let id = ObstacleId::new("door");
        g.set_obstacle_blocking(&id, true).unwrap();
        assert!(g.edges().iter().any(|e| !e.is_clear()));
        let closed = g.clone();
        g.set_obstacle_blocking(&id, true).unwrap();
        assert_eq!(g, closed);
        g.set_obstacle_blocking(&id, false).unwrap();
        assert_eq!(g, registered);
        assert_eq!(g.edges(), before.edges());
        assert_eq!(
            g.set_obstacle_blocking(&ObstacleId::new("nope"), true),
            Err(NavGraphError::UnknownObstacle(ObstacleId::new("nope")))
        );
    }

    #[test]
    fn overlapping_obstacles_keep_edge_blocked() {
        let mut g = square_graph();
        let b = Aabb::new(p(0.5, 0.0, 0.0), p(0.05, 0.1, 0.05));
        g.add_obstacle(Obstacle::new("a", b, true)).unwrap();
        g.add_obstacle(Obstacle::new("b", b, true)).unwrap();
        g.set_obstacle_blocking(&ObstacleId::new("a"), false).unwrap();
        let e = g.edge(VertexId(0), VertexId(1)).unwrap();
        assert!(!e.is_clear());
        assert_eq!(e.blockers.len(), 1);
    }

    #[test]
    fn effective_cost_rules() {
        let mut g = square_graph();
        let len = g.edge(VertexId(0), VertexId(1)).unwrap().natural_length;
        assert_eq!(g.effective_cost(VertexId(0), VertexId(1)).unwrap(), len);

        g.set_preferences(g.center_vertices(), 2.0).unwrap();
        assert_eq!(g.effective_cost(VertexId(0), VertexId(1)).unwrap(), 2.0 * len);
        let to_center = g.edge(VertexId(0), VertexId(4)).unwrap().natural_length;
        assert_eq!(g.effective_cost(VertexId(0), VertexId(4)).unwrap(), to_center);
        // Direction-dependent when only one endpoint is preferred.
        assert_eq!(g.effective_cost(VertexId(4), VertexId(0)).unwrap(), 2.0 * to_center);

        g.set_preferences(g.center_vertices(), 1.0).unwrap();
        assert_eq!(g.effective_cost(VertexId(0), VertexId(1)).unwrap(), len);

        assert_eq!(g.set_preferences(BTreeSet::new(), 0.5), Err(NavGraphError::InvalidPenalty(0.5)));
        assert_eq!(
            g.set_preferences([VertexId(40)].into(), 2.0),
            Err(NavGraphError::UnknownVertex(VertexId(40)))
        );
        assert_eq!(
            g.effective_cost(VertexId(1), VertexId(3)),
            Err(NavGraphError::NoSuchEdge(VertexId(1), VertexId(3)))
        );
    }

    #[test]
    fn shaped_cost_with_exact_values() {
        let verts = vec![
            (p(0.0, 0.0, 0.0), VertexKind::Corner, Provenance::Synthetic),
            (p(1.5, 0.0, 0.0), VertexKind::Corner, Provenance::Synthetic),
        ];
        let mut g = NavGraph::from_parts(verts, &[(0, 1)]).unwrap();
        g.set_preferences([VertexId(0)].into(), 2.0).unwrap();
        assert_eq!(g.effective_cost(VertexId(0), VertexId(1)).unwrap(), 3.0);
    }

    #[test]
    fn diamond_prefers_center_route() {
        // s=(0,0) t=(2,0); two symmetric detours via (1,1) [center] and (1,-1) [corner].
        let verts = vec![
            (p(0.0, 0.0, 0.0), VertexKind::Corner, Provenance::Synthetic),
            (p(1.0, 0.0, 1.0), VertexKind::Center, Provenance::Synthetic),
            (p(1.0, 0.0, -1.0), VertexKind::Corner, Provenance::Synthetic),
            (p(2.0, 0.0, 0.0), VertexKind::Corner, Provenance::Synthetic),
        ];
        let mut g = NavGraph::from_parts(verts, &[(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        g.set_preferences([VertexId(1)].into(), 2.0).unwrap();
        let via_center = g.effective_cost(VertexId(0), VertexId(1)).unwrap()
            + g.effective_cost(VertexId(1), VertexId(3)).unwrap();
        let via_corner = g.effective_cost(VertexId(0), VertexId(2)).unwrap()
            + g.effective_cost(VertexId(2), VertexId(3)).unwrap();
        let s2 = 2f64.sqrt();
        assert!((via_center - (s2 + 2.0 * s2)).abs() < 1e-12);
        assert!((via_corner - 4.0 * s2).abs() < 1e-12);
        assert!(via_center < via_corner);
    }

    #[test]
    fn border_selector_and_export() {
        let g = square_graph();
        let border: Vec<_> = g.border_vertices().into_iter().collect();
        assert_eq!(border, vec![VertexId(0), VertexId(1), VertexId(2), VertexId(3)]);
        let export = g.to_export();
        assert_eq!(export.vertices.len(), 6);
        assert_eq!(export.edges.len(), 12);
        let json = serde_json::to_value(&export).unwrap();
        assert_eq!(json["vertices"][4]["kind"], "center");
        assert_eq!(json["vertices"][0]["pos"], serde_json::json!([0.0, 0.0, 0.0]));
        assert_eq!(json["edges"][0]["clear"], true);
    }

    #[test]
    fn rejects_bad_edges() {
        let verts = vec![
            (p(0.0, 0.0, 0.0), VertexKind::Corner, Provenance::Synthetic),
            (p(1.0, 0.0, 0.0), VertexKind::Corner, Provenance::Synthetic),
        ];
        assert!(NavGraph::from_parts(verts.clone(), &[(0, 0)]).is_err());
        assert!(NavGraph::from_parts(verts.clone(), &[(0, 1), (1, 0)]).is_err());
        assert!(NavGraph::from_parts(verts, &[(0, 2)]).is_err());
    }
}
