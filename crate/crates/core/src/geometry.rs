//! Convex polygon primitives and bounded Voronoi tessellation.
//!
//! Polygons are plain counter-clockwise vertex lists. The tessellation clips
//! the domain by one perpendicular-bisector half-plane per competing generator,
//! which is O(n²) per call and exact up to the vertex merge tolerance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vector::Vec2;

/// Vertices closer than this (meters) are merged; vertices this close to the
/// line through their neighbours are dropped.
pub const MERGE_TOL: f64 = 1e-12;

/// Minimum separation between generators accepted by [`voronoi_cells`].
pub const COINCIDENT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon has {0} vertices, at least 3 are required")]
    TooFewVertices(usize),
    #[error("polygon vertex {index} is non-finite")]
    NonFinite { index: usize },
    #[error("polygon vertices {first} and {second} coincide")]
    RepeatedVertex { first: usize, second: usize },
    #[error("polygon is not counter-clockwise (signed area {0})")]
    NotCounterClockwise(f64),
    #[error("polygon is not strictly convex at vertex {0}")]
    NotConvex(usize),
    #[error("half-plane normal is zero")]
    ZeroNormal,
    #[error("generators {first} and {second} coincide (distance {distance:e} m)")]
    CoincidentGenerators {
        first: usize,
        second: usize,
        distance: f64,
    },
    #[error("generator {index} at {position} lies outside the domain")]
    OutsideDomain { index: usize, position: Vec2 },
}

/// Convex, counter-clockwise region to be covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec2>", into = "Vec<Vec2>")]
pub struct DomainPolygon {
    vertices: Vec<Vec2>,
}

impl DomainPolygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        if let Some(index) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if vertices[i].distance(vertices[j]) <= MERGE_TOL {
                    return Err(GeometryError::RepeatedVertex {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        let area = signed_area(&vertices);
        if area <= 0.0 {
            return Err(GeometryError::NotCounterClockwise(area));
        }
        for i in 0..n {
            let a = vertices[(i + n - 1) % n];
            let b = vertices[i];
            let c = vertices[(i + 1) % n];
            if (b - a).cross(c - b) <= MERGE_TOL {
                return Err(GeometryError::NotConvex(i));
            }
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        Self::new(vec![
            Vec2::new(x0, y0),
            Vec2::new(x1, y0),
            Vec2::new(x1, y1),
            Vec2::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn contains(&self, q: Vec2, tol: f64) -> bool {
        point_in_convex_polygon(&self.vertices, q, tol)
    }

    /// Nearest point of the (closed) domain to `q`.
    pub fn closest_point(&self, q: Vec2) -> Vec2 {
        if self.contains(q, 0.0) {
            return q;
        }
        let n = self.vertices.len();
        let mut best = self.vertices[0];
        let mut best_d2 = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let ab = b - a;
            let s = ((q - a).dot(ab) / ab.norm_squared()).clamp(0.0, 1.0);
            let c = a + ab * s;
            let d2 = (q - c).norm_squared();
            if d2 < best_d2 {
                best_d2 = d2;
                best = c;
            }
        }
        best
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        bounding_box(&self.vertices)
    }
}

impl TryFrom<Vec<Vec2>> for DomainPolygon {
    type Error = GeometryError;
    fn try_from(v: Vec<Vec2>) -> Result<Self, Self::Error> {
        DomainPolygon::new(v)
    }
}

impl From<DomainPolygon> for Vec<Vec2> {
    fn from(d: DomainPolygon) -> Self {
        d.vertices
    }
}

pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * acc
}

/// Shoelace area of a convex CCW polygon; empty or degenerate input gives 0.
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    signed_area(poly).abs()
}

pub fn vertex_average(poly: &[Vec2]) -> Vec2 {
    let sum = poly.iter().fold(Vec2::ZERO, |acc, &v| acc + v);
    sum / poly.len() as f64
}

/// Centroid of the polygon's area (uniform density).
pub fn area_centroid(poly: &[Vec2]) -> Vec2 {
    let n = poly.len();
    let mut twice_area = 0.0;
    let mut acc = Vec2::ZERO;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let w = a.cross(b);
        twice_area += w;
        acc += (a + b) * w;
    }
    if twice_area == 0.0 {
        return vertex_average(poly);
    }
    acc / (3.0 * twice_area)
}

pub fn bounding_box(poly: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in poly {
        lo.x = lo.x.min(v.x);
        lo.y = lo.y.min(v.y);
        hi.x = hi.x.max(v.x);
        hi.y = hi.y.max(v.y);
    }
    (lo, hi)
}

/// Membership test for a convex CCW polygon. `tol` widens the polygon by
/// that many meters along each edge normal.
pub fn point_in_convex_polygon(poly: &[Vec2], q: Vec2, tol: f64) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = b - a;
        e.cross(q - a) >= -tol * e.norm()
    })
}

/// Intersect a convex CCW polygon with the half-plane `normal · q <= offset`.
///
/// The result is convex and CCW, with duplicate and collinear vertices merged;
/// it is empty when fewer than three distinct vertices survive.
pub fn clip_halfplane(poly: &[Vec2], normal: Vec2, offset: f64) -> Result<Vec<Vec2>, GeometryError> {
    if poly.len() < 3 {
        return Err(GeometryError::TooFewVertices(poly.len()));
    }
    let scale = normal.norm();
    if scale == 0.0 || !scale.is_finite() {
        return Err(GeometryError::ZeroNormal);
    }
    let unit = normal / scale;
    let off = offset / scale;

    let dist: Vec<f64> = poly.iter().map(|&v| unit.dot(v) - off).collect();
    if dist.iter().all(|&s| s <= MERGE_TOL) {
        return Ok(poly.to_vec());
    }
    if dist.iter().all(|&s| s > -MERGE_TOL) {
        return Ok(Vec::new());
    }

    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (poly[i], poly[j]);
        let (sa, sb) = (dist[i], dist[j]);
        let a_in = sa <= 0.0;
        let b_in = sb <= 0.0;
        if a_in {
            out.push(a);
        }
        if a_in != b_in {
            let s = sa / (sa - sb);
            out.push(a + (b - a) * s);
        }
    }
    Ok(simplify(out))
}

/// Drop repeated and collinear vertices; returns empty if the polygon collapses.
fn simplify(mut poly: Vec<Vec2>) -> Vec<Vec2> {
    loop {
        let n = poly.len();
        if n < 3 {
            return Vec::new();
        }
        let mut removed = false;
        for i in 0..n {
            let a = poly[(i + n - 1) % n];
            let b = poly[i];
            let c = poly[(i + 1) % n];
            let ac = c - a;
            let redundant = if b.distance(a) <= MERGE_TOL || b.distance(c) <= MERGE_TOL {
                true
            } else {
                let len = ac.norm();
                len <= MERGE_TOL || (ac.cross(b - a) / len).abs() <= MERGE_TOL
            };
            if redundant {
                poly.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return poly;
        }
    }
}

/// Half-plane of points at least as close to `p` as to `other`, as
/// `(normal, offset)` with `normal · q <= offset`.
pub fn bisector_halfplane(p: Vec2, other: Vec2) -> (Vec2, f64) {
    let normal = other - p;
    let offset = 0.5 * (other.norm_squared() - p.norm_squared());
    (normal, offset)
}

/// Cell of generator `index` within `domain`, without validating the generators.
///
/// Generators may lie outside the domain; their cells may then be empty.
pub fn restricted_cell(domain: &DomainPolygon, positions: &[Vec2], index: usize) -> Vec<Vec2> {
    let p = positions[index];
    let mut cell = domain.vertices().to_vec();
    for (j, &q) in positions.iter().enumerate() {
        if j == index {
            continue;
        }
        let (normal, offset) = bisector_halfplane(p, q);
        // Zero normals are excluded by the callers' coincidence checks.
        cell = clip_halfplane(&cell, normal, offset).unwrap_or_default();
        if cell.is_empty() {
            break;
        }
    }
    cell
}

/// Checks that no two generators lie within [`COINCIDENT_TOL`] of each other.
pub fn check_distinct(positions: &[Vec2]) -> Result<(), GeometryError> {
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            let distance = positions[i].distance(positions[j]);
            if distance <= COINCIDENT_TOL {
                return Err(GeometryError::CoincidentGenerators {
                    first: i,
                    second: j,
                    distance,
                });
            }
        }
    }
    Ok(())
}

/// Bounded Voronoi tessellation of `domain` by `positions`.
///
/// Every generator must lie inside the domain and be distinct from the others.
pub fn voronoi_cells(domain: &DomainPolygon, positions: &[Vec2]) -> Result<Vec<Vec<Vec2>>, GeometryError> {
    for (index, &position) in positions.iter().enumerate() {
        if !position.is_finite() || !domain.contains(position, MERGE_TOL) {
            return Err(GeometryError::OutsideDomain { index, position });
        }
    }
    check_distinct(positions)?;
    Ok((0..positions.len())
        .map(|i| restricted_cell(domain, positions, i))
        .collect())
}
