//! 3D primitives shared by the rest of the crate: points, segments,
//! axis-aligned boxes, and the handful of queries the navigation code needs.
//!
//! World coordinates are meters with `y` pointing up. All comparisons are
//! closed: a segment touching a box face intersects the box.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("degenerate ray: endpoint coincides with the apex")]
    DegenerateRay,
}

/// A location in world space. Serialized as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Point) -> Point {
        Point::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(
            0.5 * (self.x + other.x),
            0.5 * (self.y + other.y),
            0.5 * (self.z + other.z),
        )
    }

    fn axis(&self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl From<[f64; 3]> for Point {
    fn from(v: [f64; 3]) -> Self {
        Point::new(v[0], v[1], v[2])
    }
}

impl From<Point> for [f64; 3] {
    fn from(p: Point) -> Self {
        [p.x, p.y, p.z]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Euclidean distance between two points.
pub fn distance(a: Point, b: Point) -> f64 {
    (b - a).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
}

impl Segment {
    pub const fn new(start: Point, end: Point) -> Self {
        Segment { start, end }
    }

    pub fn length(&self) -> f64 {
        distance(self.start, self.end)
    }

    pub fn at(&self, t: f64) -> Point {
        self.start.lerp(self.end, t)
    }
}

/// Axis-aligned box given by its center and per-axis half-widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub center: Point,
    pub extents: Point,
}

impl Aabb {
    pub fn new(center: Point, extents: Point) -> Self {
        debug_assert!(extents.x >= 0.0 && extents.y >= 0.0 && extents.z >= 0.0);
        Aabb { center, extents }
    }

    pub fn min(&self) -> Point {
        self.center - self.extents
    }

    pub fn max(&self) -> Point {
        self.center + self.extents
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        let (lo, hi) = (self.min(), self.max());
        (0..3).all(|i| p.axis(i) >= lo.axis(i) && p.axis(i) <= hi.axis(i))
    }

    /// Open containment: the point lies in the interior, not on a face.
    pub fn contains_strictly(&self, p: Point) -> bool {
        let (lo, hi) = (self.min(), self.max());
        (0..3).all(|i| p.axis(i) > lo.axis(i) && p.axis(i) < hi.axis(i))
    }

    /// Parameter interval `[t_enter, t_exit] ⊆ [0, 1]` of the segment that lies
    /// in the closed box, or `None` when they are disjoint.
    pub fn clip(&self, s: &Segment) -> Option<(f64, f64)> {
        let (lo, hi) = (self.min(), self.max());
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        for i in 0..3 {
            let origin = s.start.axis(i);
            let d = s.end.axis(i) - origin;
            if d == 0.0 {
                if origin < lo.axis(i) || origin > hi.axis(i) {
                    return None;
                }
                continue;
            }
            let mut near = (lo.axis(i) - origin) / d;
            let mut far = (hi.axis(i) - origin) / d;
            if near > far {
                std::mem::swap(&mut near, &mut far);
            }
            t0 = t0.max(near);
            t1 = t1.min(far);
            if t0 > t1 {
                return None;
            }
        }
        Some((t0, t1))
    }
}

/// True iff some point of the closed segment lies in the closed box.
pub fn segment_intersects_box(s: &Segment, b: &Aabb) -> bool {
    b.clip(s).is_some()
}

/// Angle in degrees between the rays `apex→p` and `apex→q`.
pub fn interior_angle(apex: Point, p: Point, q: Point) -> Result<f64, GeometryError> {
    let u = p - apex;
    let v = q - apex;
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(GeometryError::DegenerateRay);
    }
    let cos = (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(cos.acos().to_degrees())
}

pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * (b - a).cross(c - a).norm()
}

pub fn centroid(a: Point, b: Point, c: Point) -> Point {
    Point::new(
        (a.x + b.x + c.x) / 3.0,
        (a.y + b.y + c.y) / 3.0,
        (a.z + b.z + c.z) / 3.0,
    )
}

/// Closest point on triangle `abc` to `p` (Ericson, Real-Time Collision Detection 5.1.5).
pub fn closest_point_on_triangle(p: Point, a: Point, b: Point, c: Point) -> Point {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}
