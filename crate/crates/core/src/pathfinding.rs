//! Optimal search over the unblocked subgraph.
//!
//! Only clear edges are expanded. Costs are the preference-shaped edge costs,
//! which depend on the entered vertex, so the search runs over the directed
//! expansion of the undirected graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{distance, Point};
use crate::navgraph::{NavGraph, NavGraphError, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    AStar,
    Dijkstra,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("graph has no vertices")]
    EmptyGraph,
}

impl From<NavGraphError> for PathError {
    fn from(e: NavGraphError) -> Self {
        match e {
            NavGraphError::UnknownVertex(v) => PathError::UnknownVertex(v),
            _ => PathError::EmptyGraph,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    /// Sum of effective (preference-shaped) edge costs.
    pub total_cost: f64,
    /// Sum of natural edge lengths.
    pub total_length: f64,
}

impl Path {
    fn from_vertices(g: &NavGraph, vertices: Vec<VertexId>) -> Path {
        let mut total_cost = 0.0;
        let mut total_length = 0.0;
        for w in vertices.windows(2) {
            let e = g.edge(w[0], w[1]).expect("path follows graph edges");
            total_length += e.natural_length;
            total_cost += g.shaped(e.natural_length, w[1]);
        }
        Path { vertices, total_cost, total_length }
    }

    pub fn source(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn target(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    pub fn to_json(&self) -> PathJson {
        PathJson {
            path: Some(self.vertices.clone()),
            cost: Some(self.total_cost),
            length: Some(self.total_length),
        }
    }
}

/// CLI output shape; `path` is `null` when no path exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub path: Option<Vec<VertexId>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub length: Option<f64>,
}

impl PathJson {
    pub fn none() -> Self {
        PathJson { path: None, cost: None, length: None }
    }
}

/// Min-heap entry ordered by priority, then by vertex id.
#[derive(Debug, Clone, Copy)]
struct Frontier {
    priority: f64,
    cost: f64,
    vertex: VertexId,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .priority
            .total_cmp(&self.priority)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Minimum-cost path from `from` to `to` over clear edges, or `None` when
/// `to` is unreachable.
pub fn find_path(
    g: &NavGraph,
    from: VertexId,
    to: VertexId,
    algorithm: Algorithm,
) -> Result<Option<Path>, PathError> {
    for v in [from, to] {
        if !g.contains(v) {
            return Err(PathError::UnknownVertex(v));
        }
    }
    let goal = g.position(to);
    let heuristic = |v: VertexId| match algorithm {
        Algorithm::AStar => distance(g.position(v), goal),
        Algorithm::Dijkstra => 0.0,
    };

    let n = g.vertex_count();
    let mut best = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    best[from.0] = 0.0;
    heap.push(Frontier { priority: heuristic(from), cost: 0.0, vertex: from });

    while let Some(Frontier { cost, vertex, .. }) = heap.pop() {
        if cost > best[vertex.0] {
            continue;
        }
        if vertex == to {
            let mut vertices = vec![to];
            let mut cur = to;
            while let Some(p) = parent[cur.0] {
                vertices.push(p);
                cur = p;
            }
            vertices.reverse();
            return Ok(Some(Path::from_vertices(g, vertices)));
        }
        for (w, e) in g.neighbors(vertex) {
            if !e.is_clear() {
                continue;
            }
            let next = cost + g.shaped(e.natural_length, w);
            if next < best[w.0] {
                best[w.0] = next;
                parent[w.0] = Some(vertex);
                heap.push(Frontier { priority: next + heuristic(w), cost: next, vertex: w });
            }
        }
    }
    Ok(None)
}

/// Snap both points to their nearest vertices and search between them.
pub fn path_between_points(
    g: &NavGraph,
    a: Point,
    b: Point,
    algorithm: Algorithm,
) -> Result<Option<Path>, PathError> {
    let from = g.nearest_vertex(a)?;
    let to = g.nearest_vertex(b)?;
    find_path(g, from, to, algorithm)
}

/// Single-source minimum effective cost to every vertex over clear edges;
/// `None` for unreachable vertices.
pub fn cost_map(g: &NavGraph, from: VertexId) -> Result<Vec<Option<f64>>, PathError> {
    if !g.contains(from) {
        return Err(PathError::UnknownVertex(from));
    }
    let mut best = vec![f64::INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    best[from.0] = 0.0;
    heap.push(Frontier { priority: 0.0, cost: 0.0, vertex: from });
    while let Some(Frontier { cost, vertex, .. }) = heap.pop() {
        if cost > best[vertex.0] {
            continue;
        }
        for (w, e) in g.neighbors(vertex) {
            if !e.is_clear() {
                continue;
            }
            let next = cost + g.shaped(e.natural_length, w);
            if next < best[w.0] {
                best[w.0] = next;
                heap.push(Frontier { priority: next, cost: next, vertex: w });
            }
        }
    }
    Ok(best.into_iter().map(|c| c.is_finite().then_some(c)).collect())
}
