//! Triangulated navigation mesh: loading and validation of the exported
//! polygon mesh, face adjacency, border edges, and granularity refinement.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{centroid, distance, triangle_area, Point};

pub type FaceId = usize;

/// Upper bound on the face count `refine` is allowed to produce.
pub const MAX_REFINED_FACES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("malformed mesh: {0}")]
    Malformed(String),
    #[error("non-manifold edge ({a}, {b}) is shared by more than two faces")]
    NonManifold { a: usize, b: usize },
    #[error("unknown face {0}")]
    UnknownFace(FaceId),
    #[error("visibility range must be positive, got {0}")]
    InvalidRange(f64),
    #[error("refinement produced more than {0} faces")]
    NonTerminating(usize),
}

/// Mesh as it appears in world files: vertex positions and convex polygons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMesh {
    pub vertices: Vec<Point>,
    pub faces: Vec<Vec<usize>>,
}

/// An undirected corner edge together with the faces using it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshEdge {
    /// Smaller vertex index.
    pub a: usize,
    /// Larger vertex index.
    pub b: usize,
    pub faces: Vec<FaceId>,
    /// Endpoints in the winding order of `faces[0]`.
    pub wound: (usize, usize),
}

impl MeshEdge {
    pub fn is_border(&self) -> bool {
        self.faces.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NavMesh {
    vertices: Vec<Point>,
    faces: Vec<[usize; 3]>,
    edges: Vec<MeshEdge>,
    neighbors: Vec<Vec<FaceId>>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn is_degenerate(a: Point, b: Point, c: Point) -> bool {
    let longest = distance(a, b).max(distance(b, c)).max(distance(c, a));
    triangle_area(a, b, c) <= 1e-12 * longest * longest
}

/// Parse and validate a raw mesh, fan-triangulating polygons from their first corner.
pub fn load_mesh(raw: &RawMesh) -> Result<NavMesh, MeshError> {
    if let Some(i) = raw.vertices.iter().position(|v| !v.is_finite()) {
        return Err(MeshError::Malformed(format!("vertex {i} has a non-finite coordinate")));
    }
    let mut triangles = Vec::with_capacity(raw.faces.len());
    for (fi, poly) in raw.faces.iter().enumerate() {
        if poly.len() < 3 {
            return Err(MeshError::Malformed(format!("face {fi} has fewer than 3 corners")));
        }
        for (k, &v) in poly.iter().enumerate() {
            if v >= raw.vertices.len() {
                return Err(MeshError::Malformed(format!(
                    "face {fi} references vertex {v} but only {} exist",
                    raw.vertices.len()
                )));
            }
            if poly[..k].contains(&v) {
                return Err(MeshError::Malformed(format!("face {fi} repeats vertex {v}")));
            }
        }
        for k in 1..poly.len() - 1 {
            triangles.push([poly[0], poly[k], poly[k + 1]]);
        }
    }
    NavMesh::from_triangles(raw.vertices.clone(), triangles)
}

impl NavMesh {
    /// Build from already triangulated faces, validating every invariant.
    pub fn from_triangles(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= vertices.len()) {
                return Err(MeshError::Malformed(format!("face {fi} has an out-of-range index")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::Malformed(format!("face {fi} repeats a vertex")));
            }
            if is_degenerate(vertices[f[0]], vertices[f[1]], vertices[f[2]]) {
                return Err(MeshError::Malformed(format!("face {fi} has zero area")));
            }
        }

        let mut by_key: BTreeMap<(usize, usize), MeshEdge> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (u, v) = (f[k], f[(k + 1) % 3]);
                let (a, b) = edge_key(u, v);
                let e = by_key.entry((a, b)).or_insert_with(|| MeshEdge {
                    a,
                    b,
                    faces: Vec::with_capacity(2),
                    wound: (u, v),
                });
                e.faces.push(fi);
                if e.faces.len() > 2 {
                    return Err(MeshError::NonManifold { a, b });
                }
            }
        }

        let mut neighbors = vec![Vec::new(); faces.len()];
        for e in by_key.values() {
            if let [f, g] = e.faces[..] {
                neighbors[f].push(g);
                neighbors[g].push(f);
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
            n.dedup();
        }

        Ok(NavMesh {
            vertices,
            faces,
            edges: by_key.into_values().collect(),
            neighbors,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// All corner edges, ordered by `(a, b)`.
    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn neighbors(&self, f: FaceId) -> Result<&[FaceId], MeshError> {
        self.neighbors.get(f).map(Vec::as_slice).ok_or(MeshError::UnknownFace(f))
    }

    pub fn corners(&self, f: FaceId) -> Result<[Point; 3], MeshError> {
        let t = self.faces.get(f).ok_or(MeshError::UnknownFace(f))?;
        Ok([self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]])
    }

    pub fn face_center(&self, f: FaceId) -> Result<Point, MeshError> {
        let [a, b, c] = self.corners(f)?;
        Ok(centroid(a, b, c))
    }

    pub fn face_area(&self, f: FaceId) -> Result<f64, MeshError> {
        let [a, b, c] = self.corners(f)?;
        Ok(triangle_area(a, b, c))
    }

    /// Largest distance from a corner of `f` to its centroid.
    pub fn corner_reach(&self, f: FaceId) -> Result<f64, MeshError> {
        let [a, b, c] = self.corners(f)?;
        let m = centroid(a, b, c);
        Ok(distance(a, m).max(distance(b, m)).max(distance(c, m)))
    }

    pub fn border_edges(&self) -> impl Iterator<Item = &MeshEdge> {
        self.edges.iter().filter(|e| e.is_border())
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f).unwrap()).sum()
    }

    pub fn border_length(&self) -> f64 {
        self.border_edges()
            .map(|e| distance(self.vertices[e.a], self.vertices[e.b]))
            .sum()
    }

    /// Indices of vertices used by at least one face, ascending.
    pub fn referenced_vertices(&self) -> Vec<usize> {
        let mut used = vec![false; self.vertices.len()];
        for f in &self.faces {
            for &v in f {
                used[v] = true;
            }
        }
        (0..self.vertices.len()).filter(|&v| used[v]).collect()
    }

    /// Canonical raw form: the triangles themselves.
    pub fn to_raw(&self) -> RawMesh {
        RawMesh {
            vertices: self.vertices.clone(),
            faces: self.faces.iter().map(|f| f.to_vec()).collect(),
        }
    }
}

/// Split faces until every face's corner-to-centroid distance is below
/// `visibility_range`, using conforming longest-edge (LEPP) bisection.
pub fn refine(mesh: &NavMesh, visibility_range: f64) -> Result<NavMesh, MeshError> {
    if !(visibility_range > 0.0) || !visibility_range.is_finite() {
        return Err(MeshError::InvalidRange(visibility_range));
    }
    let mut work = Bisector::new(mesh);
    loop {
        let mut split_any = false;
        let mut f = 0;
        while f < work.faces.len() {
            if work.corner_reach(f) >= visibility_range {
                work.refine_face(f)?;
                split_any = true;
            } else {
                f += 1;
            }
        }
        if !split_any {
            break;
        }
    }
    if work.faces.len() == mesh.face_count() {
        return Ok(mesh.clone());
    }
    NavMesh::from_triangles(work.vertices, work.faces)
}

/// Mutable triangle soup used while bisecting.
struct Bisector {
    vertices: Vec<Point>,
    faces: Vec<[usize; 3]>,
    edge_faces: HashMap<(usize, usize), Vec<FaceId>>,
}

impl Bisector {
    fn new(mesh: &NavMesh) -> Self {
        let mut edge_faces: HashMap<(usize, usize), Vec<FaceId>> = HashMap::new();
        for e in mesh.edges() {
            edge_faces.insert((e.a, e.b), e.faces.clone());
        }
        Bisector {
            vertices: mesh.vertices.clone(),
            faces: mesh.faces.clone(),
            edge_faces,
        }
    }

    fn corner_reach(&self, f: FaceId) -> f64 {
        let [a, b, c] = self.faces[f].map(|v| self.vertices[v]);
        let m = centroid(a, b, c);
        distance(a, m).max(distance(b, m)).max(distance(c, m))
    }

    /// Longest edge of `f`; ties go to the lexicographically larger vertex pair so
    /// that edge keys form a strict total order along any LEPP chain.
    fn longest_edge(&self, f: FaceId) -> (usize, usize) {
        let t = self.faces[f];
        (0..3)
            .map(|k| edge_key(t[k], t[(k + 1) % 3]))
            .max_by(|x, y| {
                let lx = distance(self.vertices[x.0], self.vertices[x.1]);
                let ly = distance(self.vertices[y.0], self.vertices[y.1]);
                lx.total_cmp(&ly).then(x.cmp(y))
            })
            .unwrap()
    }

    fn across(&self, f: FaceId, e: (usize, usize)) -> Option<FaceId> {
        self.edge_faces[&e].iter().copied().find(|&g| g != f)
    }

    /// Bisect `f` along its longest edge, first refining the longest-edge
    /// propagation path so the split edge is terminal (longest in both faces).
    fn refine_face(&mut self, f: FaceId) -> Result<(), MeshError> {
        let mut stack = vec![f];
        while let Some(&top) = stack.last() {
            let e = self.longest_edge(top);
            match self.across(top, e) {
                None => {
                    self.bisect(e, &[top])?;
                    stack.pop();
                }
                Some(n) if self.longest_edge(n) == e => {
                    self.bisect(e, &[top, n])?;
                    stack.pop();
                }
                Some(n) => stack.push(n),
            }
        }
        Ok(())
    }

    fn bisect(&mut self, e: (usize, usize), faces: &[FaceId]) -> Result<(), MeshError> {
        if self.faces.len() + faces.len() > MAX_REFINED_FACES {
            return Err(MeshError::NonTerminating(MAX_REFINED_FACES));
        }
        let m = self.vertices.len();
        self.vertices.push(self.vertices[e.0].midpoint(self.vertices[e.1]));
        self.edge_faces.remove(&e);
        for &f in faces {
            let t = self.faces[f];
            let k = (0..3)
                .find(|&k| edge_key(t[k], t[(k + 1) % 3]) == e)
                .expect("face must contain the split edge");
            let (u, v, w) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let g = self.faces.len();
            self.faces[f] = [u, m, w];
            self.faces.push([m, v, w]);

            // Edge (v, w) moves from f to g.
            let vw = self.edge_faces.get_mut(&edge_key(v, w)).unwrap();
            for x in vw.iter_mut() {
                if *x == f {
                    *x = g;
                }
            }
            self.edge_faces.entry(edge_key(u, m)).or_default().push(f);
            self.edge_faces.entry(edge_key(m, v)).or_default().push(g);
            self.edge_faces.entry(edge_key(m, w)).or_default().extend([f, g]);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    pub(crate) fn unit_square() -> RawMesh {
        RawMesh {
            vertices: vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(1.0, 0.0, 1.0), p(0.0, 0.0, 1.0)],
            faces: vec![vec![0, 1, 2, 3]],
        }
    }

    fn single_triangle() -> RawMesh {
        RawMesh {
            vertices: vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 0.0, 1.0)],
            faces: vec![vec![0, 1, 2]],
        }
    }

    fn equilateral(side: f64) -> RawMesh {
        let h = side * 3f64.sqrt() / 2.0;
        RawMesh {
            vertices: vec![p(0.0, 0.0, 0.0), p(side, 0.0, 0.0), p(side / 2.0, 0.0, h)],
            faces: vec![vec![0, 1, 2]],
        }
    }

    #[test]
    fn quad_is_fan_triangulated() {
        let m = load_mesh(&unit_square()).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
        assert_eq!(m.neighbors(0).unwrap(), &[1]);
        assert_eq!(m.neighbors(1).unwrap(), &[0]);
        let shared: Vec<_> = m.edges().iter().filter(|e| !e.is_border()).collect();
        assert_eq!(shared.len(), 1);
        assert_eq!((shared[0].a, shared[0].b), (0, 2));
    }

    #[test]
    fn single_triangle_is_all_border() {
        let m = load_mesh(&single_triangle()).unwrap();
        assert_eq!(m.face_count(), 1);
        assert_eq!(m.border_edges().count(), 3);
        assert!(m.neighbors(0).unwrap().is_empty());
    }

    #[test]
    fn rejects_malformed_faces() {
        let mut raw = unit_square();
        raw.faces = vec![vec![0, 1, 99]];
        assert!(matches!(load_mesh(&raw), Err(MeshError::Malformed(_))));
        raw.faces = vec![vec![0, 1, 1]];
        assert!(matches!(load_mesh(&raw), Err(MeshError::Malformed(_))));
        raw.faces = vec![vec![0, 1]];
        assert!(matches!(load_mesh(&raw), Err(MeshError::Malformed(_))));
        let collinear = RawMesh {
            vertices: vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(2.0, 0.0, 0.0)],
            faces: vec![vec![0, 1, 2]],
        };
        assert!(matches!(load_mesh(&collinear), Err(MeshError::Malformed(_))));
    }

    #[test]
    fn rejects_non_manifold_edges() {
        let raw = RawMesh {
            vertices: vec![
                p(0.0, 0.0, 0.0),
                p(1.0, 0.0, 0.0),
                p(0.5, 0.0, 1.0),
                p(0.5, 0.0, -1.0),
                p(0.5, 1.0, 0.0),
            ],
            faces: vec![vec![0, 1, 2], vec![1, 0, 3], vec![0, 1, 4]],
        };
        assert_eq!(load_mesh(&raw), Err(MeshError::NonManifold { a: 0, b: 1 }));
    }

    #[test]
    fn face_centers() {
        let m = load_mesh(&single_triangle()).unwrap();
        let c = m.face_center(0).unwrap();
        assert!((c.x - 1.0 / 3.0).abs() < 1e-12 && c.y == 0.0 && (c.z - 1.0 / 3.0).abs() < 1e-12);
        let big = RawMesh {
            vertices: vec![p(0.0, 0.0, 0.0), p(3.0, 0.0, 0.0), p(0.0, 0.0, 3.0)],
            faces: vec![vec![0, 1, 2]],
        };
        let c = load_mesh(&big).unwrap().face_center(0).unwrap();
        assert!(distance(c, p(1.0, 0.0, 1.0)) < 1e-12);
        let eq = load_mesh(&equilateral(2.0)).unwrap();
        assert!((eq.corner_reach(0).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-9);
        assert_eq!(m.face_center(7), Err(MeshError::UnknownFace(7)));
    }

    #[test]
    fn border_edges_after_removing_a_triangle() {
        let m = load_mesh(&unit_square()).unwrap();
        let rim: Vec<_> = m.border_edges().map(|e| (e.a, e.b)).collect();
        assert_eq!(rim, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);

        let half = NavMesh::from_triangles(m.vertices().to_vec(), vec![[0, 1, 2]]).unwrap();
        let rim: Vec<_> = half.border_edges().map(|e| (e.a, e.b)).collect();
        assert_eq!(rim, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn incidences_are_three_per_face() {
        let m = load_mesh(&unit_square()).unwrap();
        let r = refine(&m, 0.2).unwrap();
        let inc: usize = r.edges().iter().map(|e| e.faces.len()).sum();
        assert_eq!(inc, 3 * r.face_count());
    }

    #[test]
    fn raw_round_trip_is_idempotent() {
        let m = load_mesh(&unit_square()).unwrap();
        let again = load_mesh(&m.to_raw()).unwrap();
        assert_eq!(m, again);
        assert_eq!(again, load_mesh(&again.to_raw()).unwrap());
    }

    #[test]
    fn refine_noop_when_fine_enough() {
        let m = load_mesh(&unit_square()).unwrap();
        let r = refine(&m, 10.0).unwrap();
        assert_eq!(r.face_count(), m.face_count());
        assert_eq!(r, m);
    }

    #[test]
    fn refine_equilateral_meets_granularity() {
        let m = load_mesh(&equilateral(2.0)).unwrap();
        let r = refine(&m, 1.0).unwrap();
        assert!(r.face_count() > 1);
        // Brute-force check over every output face and corner.
        for f in 0..r.face_count() {
            let [a, b, c] = r.corners(f).unwrap();
            let m = Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0, (a.z + b.z + c.z) / 3.0);
            for q in [a, b, c] {
                assert!(distance(q, m) < 1.0);
            }
        }
        assert!((r.total_area() - m.total_area()).abs() <= 1e-6 * m.total_area());
        assert!((r.border_length() - m.border_length()).abs() <= 1e-6 * m.border_length());
    }

    #[test]
    fn refine_keeps_mesh_conforming() {
        let m = load_mesh(&unit_square()).unwrap();
        let r = refine(&m, 0.1).unwrap();
        // Interior edges shared by two faces; border stays on the unit-square rim.
        for e in r.border_edges() {
            let (a, b) = (r.vertices()[e.a], r.vertices()[e.b]);
            let on_rim = |q: Point| q.x == 0.0 || q.x == 1.0 || q.z == 0.0 || q.z == 1.0;
            assert!(on_rim(a) && on_rim(b));
        }
        assert!((r.border_length() - 4.0).abs() < 1e-9);
        assert!((r.total_area() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn refine_rejects_bad_range() {
        let m = load_mesh(&unit_square()).unwrap();
        assert_eq!(refine(&m, 0.0), Err(MeshError::InvalidRange(0.0)));
        assert!(refine(&m, -1.0).is_err());
    }

    #[test]
    fn refine_guards_against_runaway() {
        let m = load_mesh(&unit_square()).unwrap();
        assert_eq!(refine(&m, 1e-5), Err(MeshError::NonTerminating(MAX_REFINED_FACES)));
    }
}
