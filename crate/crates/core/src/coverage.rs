//! Navigation coverage metrics and find-task verdicts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::interior_angle;
use crate::navgraph::{NavGraph, VertexId};

pub const DEFAULT_CORNER_THRESHOLD: f64 = 150.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverageError {
    #[error("border edges do not close into simple loops at {0}")]
    OpenBorderChain(VertexId),
    #[error("trace mentions {0}, which is not in the graph")]
    UnknownTraceVertex(VertexId),
    #[error("trace traverses ({0}, {1}), which is not an edge of the graph")]
    UnknownTraceEdge(VertexId, VertexId),
    #[error("corner threshold must be in (0, 180], got {0}")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "CCW")]
    Ccw,
    #[serde(rename = "CW")]
    Cw,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Ccw => Direction::Cw,
            Direction::Cw => Direction::Ccw,
        }
    }
}

/// A boundary cycle. `vertices` starts at the smallest id and is listed in
/// `direction` as seen from above (+y).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorderLoop {
    pub vertices: Vec<VertexId>,
    pub direction: Direction,
    pub signed_area: f64,
}

impl BorderLoop {
    /// Directed edges of the loop in listing order.
    pub fn directed_edges(&self) -> Vec<(VertexId, VertexId)> {
        let n = self.vertices.len();
        (0..n).map(|i| (self.vertices[i], self.vertices[(i + 1) % n])).collect()
    }
}

/// Indices of the border edges touching each vertex.
fn border_incidence(g: &NavGraph) -> BTreeMap<VertexId, Vec<usize>> {
    let mut inc: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        if e.is_border() {
            inc.entry(e.a).or_default().push(i);
            inc.entry(e.b).or_default().push(i);
        }
    }
    inc
}

fn check_threshold(threshold: f64) -> Result<(), CoverageError> {
    if threshold > 0.0 && threshold <= 180.0 {
        Ok(())
    } else {
        Err(CoverageError::InvalidThreshold(threshold))
    }
}

/// Border vertices with exactly two border edges meeting at less than `threshold` degrees.
pub fn detect_corners(g: &NavGraph, threshold: f64) -> Result<BTreeSet<VertexId>, CoverageError> {
    check_threshold(threshold)?;
    let edges = g.edges();
    let mut corners = BTreeSet::new();
    for (v, inc) in border_incidence(g) {
        if let [e1, e2] = inc[..] {
            let p = g.position(edges[e1].other(v));
            let q = g.position(edges[e2].other(v));
            if let Ok(angle) = interior_angle(g.position(v), p, q) {
                if angle < threshold {
                    corners.insert(v);
                }
            }
        }
    }
    Ok(corners)
}

/// Border vertices where three or more border edges meet.
pub fn border_junctions(g: &NavGraph) -> BTreeSet<VertexId> {
    border_incidence(g)
        .into_iter()
        .filter(|(_, inc)| inc.len() >= 3)
        .map(|(v, _)| v)
        .collect()
}

fn signed_area(g: &NavGraph, cycle: &[VertexId]) -> f64 {
    // y component of the summed cross products: positive is counter-clockwise from +y.
    let n = cycle.len();
    (0..n)
        .map(|i| {
            let p = g.position(cycle[i]);
            let q = g.position(cycle[(i + 1) % n]);
            p.z * q.x - p.x * q.z
        })
        .sum::<f64>()
        * 0.5
}

pub fn border_loops(g: &NavGraph) -> Result<Vec<BorderLoop>, CoverageError> {
    let inc = border_incidence(g);
    if let Some((&v, _)) = inc.iter().find(|(_, e)| e.len() != 2) {
        return Err(CoverageError::OpenBorderChain(v));
    }
    let edges = g.edges();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut loops = Vec::new();
    for (&start, start_inc) in &inc {
        if seen.contains(&start) {
            continue;
        }
        // Leave the start along the face winding if that is unambiguous.
        let outgoing: Vec<VertexId> = start_inc
            .iter()
            .filter_map(|&i| edges[i].border.filter(|w| w.0 == start).map(|w| w.1))
            .collect();
        let first = match outgoing[..] {
            [next] => next,
            _ => start_inc.iter().map(|&i| edges[i].other(start)).min().unwrap(),
        };
        let mut cycle = vec![start];
        let (mut prev, mut cur) = (start, first);
        while cur != start {
            if !seen.insert(cur) || cycle.len() > inc.len() {
                return Err(CoverageError::OpenBorderChain(cur));
            }
            cycle.push(cur);
            let next = inc[&cur].iter().map(|&i| edges[i].other(cur)).find(|&n| n != prev);
            let Some(next) = next else {
                return Err(CoverageError::OpenBorderChain(cur));
            };
            (prev, cur) = (cur, next);
        }
        seen.insert(start);
        let area = signed_area(g, &cycle);
        let direction = if area >= 0.0 { Direction::Ccw } else { Direction::Cw };
        loops.push(BorderLoop { vertices: cycle, direction, signed_area: area });
    }
    Ok(loops)
}

/// What an agent did: the vertices it saw or stood on and the edges it walked, in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub visited: BTreeSet<VertexId>,
    pub traversed: Vec<(VertexId, VertexId)>,
}

impl Trace {
    pub fn from_walk(walk: &[VertexId]) -> Self {
        Trace {
            visited: walk.iter().copied().collect(),
            traversed: walk.windows(2).filter(|w| w[0] != w[1]).map(|w| (w[0], w[1])).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopCoverage {
    #[serde(flatten)]
    pub border_loop: BorderLoop,
    pub ccw_covered: bool,
    pub cw_covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub vertex_coverage: f64,
    pub center_vertex_coverage: f64,
    pub border_edge_coverage: f64,
    pub corner_coverage: f64,
    pub corners: Vec<VertexId>,
    pub junctions: Vec<VertexId>,
    pub border_loops: Vec<LoopCoverage>,
    pub visited_vertices: BTreeSet<VertexId>,
    pub traversed_edges: BTreeSet<(VertexId, VertexId)>,
}

fn ratio(covered: usize, domain: usize) -> f64 {
    if domain == 0 {
        1.0
    } else {
        covered as f64 / domain as f64
    }
}

fn undirected(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

pub fn score(g: &NavGraph, trace: &Trace) -> Result<CoverageReport, CoverageError> {
    score_with_threshold(g, trace, DEFAULT_CORNER_THRESHOLD)
}

pub fn score_with_threshold(g: &NavGraph, trace: &Trace, threshold: f64) -> Result<CoverageReport, CoverageError> {
    if let Some(&v) = trace.visited.iter().find(|v| !g.contains(**v)) {
        return Err(CoverageError::UnknownTraceVertex(v));
    }
    for &(a, b) in &trace.traversed {
        if !g.contains(a) || !g.contains(b) || g.edge(a, b).is_none() {
            return Err(CoverageError::UnknownTraceEdge(a, b));
        }
    }
    let directed: BTreeSet<(VertexId, VertexId)> = trace.traversed.iter().copied().collect();
    let traversed: BTreeSet<_> = directed.iter().map(|&(a, b)| undirected(a, b)).collect();

    let centers = g.center_vertices();
    let corners = detect_corners(g, threshold)?;
    let border: BTreeSet<_> = g.edges().iter().filter(|e| e.is_border()).map(|e| undirected(e.a, e.b)).collect();

    // Pinched boundaries have no loop decomposition; the ratios still apply.
    let border_loops = border_loops(g)
        .unwrap_or_default()
        .into_iter()
        .map(|l| {
            let forward = l.directed_edges().iter().all(|e| directed.contains(e));
            let backward = l.directed_edges().iter().all(|&(a, b)| directed.contains(&(b, a)));
            let (ccw_covered, cw_covered) = match l.direction {
                Direction::Ccw => (forward, backward),
                Direction::Cw => (backward, forward),
            };
            LoopCoverage { border_loop: l, ccw_covered, cw_covered }
        })
        .collect();

    Ok(CoverageReport {
        vertex_coverage: ratio(trace.visited.len(), g.vertex_count()),
        center_vertex_coverage: ratio(centers.intersection(&trace.visited).count(), centers.len()),
        border_edge_coverage: ratio(border.intersection(&traversed).count(), border.len()),
        corner_coverage: ratio(corners.intersection(&trace.visited).count(), corners.len()),
        corners: corners.into_iter().collect(),
        junctions: border_junctions(g).into_iter().collect(),
        border_loops,
        visited_vertices: trace.visited.clone(),
        traversed_edges: traversed,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageRequirement {
    #[default]
    AllVertices,
    AllCenters,
}

impl CoverageRequirement {
    pub fn is_met(self, report: &CoverageReport) -> bool {
        match self {
            CoverageRequirement::AllVertices => report.vertex_coverage >= 1.0,
            CoverageRequirement::AllCenters => report.center_vertex_coverage >= 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub reason: String,
}

impl Verdict {
    pub fn new(outcome: Outcome, reason: impl Into<String>) -> Self {
        Verdict { outcome, reason: reason.into() }
    }
}

/// Verdict for "find x and check a property of it". `predicate_holds` is
/// `None` when there is nothing to check beyond finding x.
pub fn verdict_for_find_task(
    found: bool,
    predicate_holds: Option<bool>,
    report: &CoverageReport,
    required: CoverageRequirement,
) -> Verdict {
    match (found, predicate_holds) {
        (true, Some(false)) => Verdict::new(Outcome::Fail, "target found but its property check failed"),
        (true, _) => Verdict::new(Outcome::Pass, "target found and checked"),
        (false, _) if required.is_met(report) => {
            Verdict::new(Outcome::Fail, "target not found although the required coverage was reached")
        }
        (false, _) => Verdict::new(Outcome::Inconclusive, "target not found and coverage is incomplete"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::navgraph::build_navgraph;
    use crate::navmesh::{load_mesh, RawMesh};

    fn graph(vertices: &[[f64; 3]], faces: &[&[usize]]) -> NavGraph {
        let raw = RawMesh {
            vertices: vertices.iter().map(|&v| Point::from(v)).collect(),
            faces: faces.iter().map(|f| f.to_vec()).collect(),
        };
        build_navgraph(&load_mesh(&raw).unwrap())
    }

    fn unit_square() -> NavGraph {
        graph(&[[0., 0., 0.], [1., 0., 0.], [1., 0., 1.], [0., 0., 1.]], &[&[0, 1, 2, 3]])
    }

    /// 2 x 1 room of unit squares; vertices 1 and 4 sit mid-way along the long walls.
    fn long_room() -> NavGraph {
        graph(
            &[[0., 0., 0.], [1., 0., 0.], [2., 0., 0.], [0., 0., 1.], [1., 0., 1.], [2., 0., 1.]],
            &[&[0, 1, 4, 3], &[1, 2, 5, 4]],
        )
    }

    fn v(i: usize) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn corners_of_a_rectangular_room() {
        let g = long_room();
        assert_eq!(detect_corners(&g, 150.0).unwrap(), [0, 2, 3, 5].map(v).into());
        assert!(detect_corners(&g, 80.0).unwrap().is_empty());
        // At 180 degrees straight runs still do not qualify.
        assert_eq!(detect_corners(&g, 180.0).unwrap().len(), 4);
        assert!(detect_corners(&g, 0.0).is_err());
        assert!(border_junctions(&g).is_empty());
    }

    #[test]
    fn square_has_one_loop_of_its_rim() {
        let g = unit_square();
        let loops = border_loops(&g).unwrap();
        assert_eq!(loops.len(), 1);
        let l = &loops[0];
        assert_eq!(l.vertices[0], v(0));
        assert_eq!(l.vertices.iter().copied().collect::<BTreeSet<_>>(), [0, 1, 2, 3].map(v).into());
        assert!((l.signed_area.abs() - 1.0).abs() < 1e-12);
        assert_eq!(l.direction == Direction::Ccw, l.signed_area > 0.0);
    }

    #[test]
    fn orientation_matches_rotation_about_up() {
        // 0 -> (0,0,-1) is a positive turn about +y starting from +x.
        let g = graph(&[[0., 0., 0.], [1., 0., 0.], [0., 0., -1.]], &[&[0, 1, 2]]);
        let l = &border_loops(&g).unwrap()[0];
        let ccw: Vec<_> = if l.direction == Direction::Ccw {
            l.vertices.clone()
        } else {
            l.vertices.iter().rev().copied().collect()
        };
        let pos = ccw.iter().position(|&x| x == v(1)).unwrap();
        assert_eq!(ccw[(pos + 1) % 3], v(2));
    }

    #[test]
    fn disjoint_squares_have_two_loops() {
        let g = graph(
            &[
                [0., 0., 0.], [1., 0., 0.], [1., 0., 1.], [0., 0., 1.],
                [5., 0., 0.], [6., 0., 0.], [6., 0., 1.], [5., 0., 1.],
            ],
            &[&[0, 1, 2, 3], &[4, 5, 6, 7]],
        );
        let loops = border_loops(&g).unwrap();
        assert_eq!(loops.len(), 2);
        assert_eq!(loops[0].vertices[0], v(0));
        assert_eq!(loops[1].vertices[0], v(4));
    }

    #[test]
    fn bowtie_is_an_open_chain() {
        let g = graph(
            &[[0., 0., 0.], [1., 0., 0.], [0., 0., 1.], [-1., 0., 0.], [0., 0., -1.]],
            &[&[0, 1, 2], &[0, 3, 4]],
        );
        assert_eq!(border_loops(&g), Err(CoverageError::OpenBorderChain(v(0))));
        assert_eq!(border_junctions(&g), [v(0)].into());
    }

    fn full_trace(g: &NavGraph) -> Trace {
        let mut traversed = Vec::new();
        for e in g.edges() {
            traversed.push((e.a, e.b));
            traversed.push((e.b, e.a));
        }
        Trace { visited: g.vertices().iter().map(|x| x.id).collect(), traversed }
    }

    #[test]
    fn full_and_empty_traces() {
        let g = long_room();
        let r = score(&g, &full_trace(&g)).unwrap();
        assert_eq!(
            (r.vertex_coverage, r.center_vertex_coverage, r.border_edge_coverage, r.corner_coverage),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert!(r.border_loops.iter().all(|l| l.ccw_covered && l.cw_covered));
        let r = score(&g, &Trace::default()).unwrap();
        assert_eq!(
            (r.vertex_coverage, r.center_vertex_coverage, r.border_edge_coverage, r.corner_coverage),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn partial_ratios_by_counting() {
        let g = long_room();
        // Six mesh corners, then centers 6..10 of the triangles (0,1,4), (0,4,3), (1,2,5), (1,5,4).
        let trace = Trace::from_walk(&[v(0), v(1), v(2), v(8)]);
        let r = score(&g, &trace).unwrap();
        assert_eq!(r.vertex_coverage, 4.0 / 10.0);
        assert_eq!(r.center_vertex_coverage, 1.0 / 4.0);
        assert_eq!(r.border_edge_coverage, 2.0 / 6.0);
        assert_eq!(r.corner_coverage, 2.0 / 4.0);
    }

    #[test]
    fn loop_direction_needs_every_directed_edge() {
        let g = unit_square();
        let l = border_loops(&g).unwrap().remove(0);
        let mut walk = l.vertices.clone();
        walk.push(walk[0]);
        let r = score(&g, &Trace::from_walk(&walk)).unwrap();
        let lc = &r.border_loops[0];
        assert_eq!((lc.ccw_covered, lc.cw_covered), (l.direction == Direction::Ccw, l.direction == Direction::Cw));
        walk.pop();
        let r = score(&g, &Trace::from_walk(&walk)).unwrap();
        assert!(!r.border_loops[0].ccw_covered && !r.border_loops[0].cw_covered);
    }

    #[test]
    fn unknown_trace_elements() {
        let g = unit_square();
        let t = Trace { visited: [v(99)].into(), traversed: vec![] };
        assert_eq!(score(&g, &t), Err(CoverageError::UnknownTraceVertex(v(99))));
        // The fan splits the square along 0-2, so 1-3 is not an edge.
        let t = Trace { visited: BTreeSet::new(), traversed: vec![(v(1), v(3))] };
        assert_eq!(score(&g, &t), Err(CoverageError::UnknownTraceEdge(v(1), v(3))));
    }

    #[test]
    fn verdict_table() {
        let g = long_room();
        let full = score(&g, &full_trace(&g)).unwrap();
        let partial = score(&g, &Trace::from_walk(&[v(0), v(1)])).unwrap();
        let req = CoverageRequirement::AllVertices;
        assert_eq!(verdict_for_find_task(true, Some(true), &partial, req).outcome, Outcome::Pass);
        assert_eq!(verdict_for_find_task(true, None, &partial, req).outcome, Outcome::Pass);
        assert_eq!(verdict_for_find_task(true, Some(false), &full, req).outcome, Outcome::Fail);
        assert_eq!(verdict_for_find_task(false, None, &full, req).outcome, Outcome::Fail);
        assert_eq!(verdict_for_find_task(false, None, &partial, req).outcome, Outcome::Inconclusive);

        let centers_only = Trace { visited: g.center_vertices(), traversed: vec![] };
        let r = score(&g, &centers_only).unwrap();
        assert_eq!(verdict_for_find_task(false, None, &r, req).outcome, Outcome::Inconclusive);
        assert_eq!(
            verdict_for_find_task(false, None, &r, CoverageRequirement::AllCenters).outcome,
            Outcome::Fail
        );
    }

    #[test]
    fn ratios_are_monotone_in_the_trace() {
        let g = long_room();
        let full = full_trace(&g);
        let mut t = Trace::default();
        let mut last = score(&g, &t).unwrap();
        for (i, &e) in full.traversed.iter().enumerate() {
            t.traversed.push(e);
            if let Some(x) = full.visited.iter().nth(i) {
                t.visited.insert(*x);
            }
            let r = score(&g, &t).unwrap();
            assert!(r.vertex_coverage >= last.vertex_coverage);
            assert!(r.border_edge_coverage >= last.border_edge_coverage);
            assert!(r.corner_coverage >= last.corner_coverage);
            assert!(r.center_vertex_coverage >= last.center_vertex_coverage);
            last = r;
        }
    }
}
