//! Planar vector algebra, rotations and convex-polygon distance queries.
//!
//! Every force in the simulation is built from the handful of primitives in
//! this module: relative position vectors, `±π/2` rotations, and the
//! projection of a point onto the boundary of a convex obstacle.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Planar vector in meters (or m/s when used as a velocity).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Unit vector, or `None` for the zero vector.
    #[inline]
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    #[inline]
    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Counter-clockwise perpendicular, `R(π/2)·self`.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Polar angle in `(−π, π]`.
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rescales to norm `max` when longer, keeping direction. The result's
    /// computed norm never exceeds `max` (rounding is corrected downward).
    pub fn clamp_norm(self, max: f64) -> (Vec2, bool) {
        let n = self.norm();
        if n > max {
            let mut v = self * (max / n);
            while v.norm() > max {
                v = v * (1.0 - f64::EPSILON);
            }
            (v, true)
        } else {
            (self, false)
        }
    }

    /// Reflection across the x axis.
    #[inline]
    pub fn mirror_x(self) -> Vec2 {
        Vec2::new(self.x, -self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// z-component of the 3D cross product of two planar vectors.
#[inline]
pub fn cross_z(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed angle from `a` to `b` in `(−π, π]`.
#[inline]
pub fn signed_angle(a: Vec2, b: Vec2) -> f64 {
    cross_z(a, b).atan2(a.dot(b))
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// Planar rotation by a fixed angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub angle: f64,
    cos: f64,
    sin: f64,
}

impl Rotation {
    pub fn new(angle: f64) -> Self {
        Self {
            angle,
            cos: angle.cos(),
            sin: angle.sin(),
        }
    }

    /// Exact `±π/2` rotation; `positive` selects `+π/2`.
    pub fn quarter(positive: bool) -> Self {
        let sin = if positive { 1.0 } else { -1.0 };
        Self {
            angle: sin * FRAC_PI_2,
            cos: 0.0,
            sin,
        }
    }

    #[inline]
    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.cos * v.x - self.sin * v.y, self.sin * v.x + self.cos * v.y)
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation::new(self.angle + other.angle)
    }
}

/// Nearest point of a segment to `q`, with the segment parameter in `[0, 1]`.
pub fn closest_point_on_segment(q: Vec2, a: Vec2, b: Vec2) -> (Vec2, f64) {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (a, 0.0);
    }
    let t = ((q - a).dot(ab) / len2).clamp(0.0, 1.0);
    // Points exactly on the segment project onto themselves without rounding.
    if t > 0.0 && t < 1.0 && cross_z(ab, q - a) == 0.0 {
        return (q, t);
    }
    (a + ab * t, t)
}

fn orientation(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    cross_z(b - a, c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Minimum distance between two closed segments.
pub fn segment_distance(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> f64 {
    if segments_intersect(p1, p2, q1, q2) {
        return 0.0;
    }
    let d = [
        closest_point_on_segment(p1, q1, q2).0.distance(p1),
        closest_point_on_segment(p2, q1, q2).0.distance(p2),
        closest_point_on_segment(q1, p1, p2).0.distance(q1),
        closest_point_on_segment(q2, p1, p2).0.distance(q2),
    ];
    d.into_iter().fold(f64::INFINITY, f64::min)
}

/// Boundary projection result: the nearest boundary point and the edge it lies on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub point: Vec2,
    pub edge: usize,
}

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    centroid: Vec2,
}

impl ConvexPolygon {
    /// Builds a polygon from its vertex loop. Clockwise input is reversed;
    /// fewer than three vertices, collinear or reflex corners are rejected.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if cross_z(b - a, c - b) <= 0.0 {
                return Err(GeometryError::NotStrictlyConvex((i + 1) % n));
            }
        }
        let centroid = area_centroid(&vertices);
        Ok(Self { vertices, centroid })
    }

    /// Rectangle of the given size centered at `center`, its width axis
    /// rotated by `angle`. The first edge is the `+width/2` side.
    pub fn rectangle(center: Vec2, width: f64, height: f64, angle: f64) -> Result<Self, GeometryError> {
        if !(width > 0.0 && height > 0.0) {
            return Err(GeometryError::DegenerateRectangle { width, height });
        }
        let rot = Rotation::new(angle);
        let (hw, hh) = (width / 2.0, height / 2.0);
        let corners = [
            Vec2::new(hw, -hh),
            Vec2::new(hw, hh),
            Vec2::new(-hw, hh),
            Vec2::new(-hw, -hh),
        ];
        Self::new(corners.iter().map(|&c| center + rot.apply(c)).collect())
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn centroid(&self) -> Vec2 {
        self.centroid
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Strict interior membership; boundary points are not contained.
    pub fn contains_strict(&self, q: Vec2) -> bool {
        self.edges().all(|(a, b)| cross_z(b - a, q - a) > 0.0)
    }

    /// Closed membership (boundary included).
    pub fn contains(&self, q: Vec2) -> bool {
        self.edges().all(|(a, b)| cross_z(b - a, q - a) >= 0.0)
    }

    /// Outward unit normal of edge `i`.
    pub fn edge_normal(&self, i: usize) -> Vec2 {
        let n = self.vertices.len();
        let e = self.vertices[(i + 1) % n] - self.vertices[i];
        Vec2::new(e.y, -e.x).normalized().unwrap_or(Vec2::new(1.0, 0.0))
    }

    /// Nearest point on the boundary. Equidistant edges resolve to the
    /// smallest edge index; interior points also get their nearest
    /// boundary point.
    pub fn project(&self, q: Vec2) -> BoundaryPoint {
        let mut best = BoundaryPoint {
            point: self.vertices[0],
            edge: 0,
        };
        let mut best_d = f64::INFINITY;
        for (i, (a, b)) in self.edges().enumerate() {
            let (p, _) = closest_point_on_segment(q, a, b);
            let d = (q - p).norm_squared();
            if d < best_d {
                best_d = d;
                best = BoundaryPoint { point: p, edge: i };
            }
        }
        best
    }

    /// Distance from `q` to the solid polygon (zero inside).
    pub fn distance_to_solid(&self, q: Vec2) -> f64 {
        if self.contains(q) {
            0.0
        } else {
            q.distance(self.project(q).point)
        }
    }

    /// Distance between segment `[p0, p1]` and the solid polygon.
    pub fn segment_distance_to_solid(&self, p0: Vec2, p1: Vec2) -> f64 {
        if self.contains(p0) || self.contains(p1) {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| segment_distance(p0, p1, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Polygon mirrored across the x axis (vertex order restored to CCW).
    pub fn mirror_x(&self) -> ConvexPolygon {
        let vertices: Vec<Vec2> = self.vertices.iter().map(|v| v.mirror_x()).collect();
        ConvexPolygon::new(vertices).expect("mirror of a convex polygon is convex")
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }
}

fn signed_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n).map(|i| cross_z(vertices[i], vertices[(i + 1) % n])).sum::<f64>()
}

fn area_centroid(vertices: &[Vec2]) -> Vec2 {
    // Shift to the first vertex to keep the shoelace sums well conditioned.
    let origin = vertices[0];
    let n = vertices.len();
    let mut area2 = 0.0;
    let mut acc = Vec2::ZERO;
    for i in 0..n {
        let a = vertices[i] - origin;
        let b = vertices[(i + 1) % n] - origin;
        let c = cross_z(a, b);
        area2 += c;
        acc += (a + b) * c;
    }
    origin + acc / (3.0 * area2)
}

/// Nearest point of `poly`'s boundary to `q`.
pub fn project_onto_boundary(q: Vec2, poly: &ConvexPolygon) -> Vec2 {
    poly.project(q).point
}

/// `q − proj(q)`: points away from the obstacle, norm equal to the
/// point-to-boundary distance. Interior points are a physics violation.
pub fn separation_vector(q: Vec2, poly: &ConvexPolygon) -> Result<Vec2, GeometryError> {
    if poly.contains_strict(q) {
        return Err(GeometryError::InsideObstacle { x: q.x, y: q.y });
    }
    Ok(q - poly.project(q).point)
}

/// Infimum distance between the two boundaries.
pub fn set_distance(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    let mut best = f64::INFINITY;
    for (p0, p1) in a.edges() {
        for (q0, q1) in b.edges() {
            best = best.min(segment_distance(p0, p1, q0, q1));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(Vec2::ZERO, 2.0, 2.0, 0.0).unwrap()
    }

    /// Dense boundary sampling, independent of the segment projection.
    fn sampled_nearest(q: Vec2, poly: &ConvexPolygon, samples: usize) -> (Vec2, f64) {
        let verts = poly.vertices();
        let n = verts.len();
        let per_edge = samples / n;
        let mut best = (verts[0], f64::INFINITY);
        for i in 0..n {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            for k in 0..per_edge {
                let p = a + (b - a) * (k as f64 / per_edge as f64);
                let d = q.distance(p);
                if d < best.1 {
                    best = (p, d);
                }
            }
        }
        best
    }

    #[test]
    fn projection_axis_case() {
        assert_eq!(
            project_onto_boundary(Vec2::new(2.0, 0.0), &unit_square()),
            Vec2::new(1.0, 0.0)
        );
    }

    #[test]
    fn projection_center_tie_goes_to_first_edge() {
        assert_eq!(project_onto_boundary(Vec2::ZERO, &unit_square()), Vec2::new(1.0, 0.0));
    }

    #[test]
    fn projection_rotated_square_matches_dense_sampling() {
        let sq = ConvexPolygon::rectangle(Vec2::ZERO, 2.0, 2.0, FRAC_PI_4).unwrap();
        let q = Vec2::new(3.0, 3.0);
        let p = project_onto_boundary(q, &sq);
        let (oracle, _) = sampled_nearest(q, &sq, 100_000);
        assert!(p.distance(oracle) < 1e-4, "{p:?} vs {oracle:?}");
    }

    #[test]
    fn separation_examples() {
        let sq = unit_square();
        assert_eq!(
            separation_vector(Vec2::new(2.0, 0.0), &sq).unwrap(),
            Vec2::new(1.0, 0.0)
        );
        assert_eq!(separation_vector(Vec2::new(1.0, 0.3), &sq).unwrap(), Vec2::ZERO);
        assert!(matches!(
            separation_vector(Vec2::new(0.2, 0.1), &sq),
            Err(GeometryError::InsideObstacle { .. })
        ));
    }

    #[test]
    fn separation_matches_sampling_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let poly = ConvexPolygon::rectangle(Vec2::new(1.0, -2.0), 6.0, 2.5, 0.7).unwrap();
        for _ in 0..50 {
            let q = Vec2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            if poly.contains(q) {
                continue;
            }
            let d = separation_vector(q, &poly).unwrap().norm();
            let (_, oracle) = sampled_nearest(q, &poly, 100_000);
            assert!((d - oracle).abs() / oracle < 1e-4, "{d} vs {oracle}");
        }
    }

    #[test]
    fn set_distance_examples() {
        let a = unit_square();
        let b = ConvexPolygon::rectangle(Vec2::new(3.0, 0.0), 2.0, 2.0, 0.0).unwrap();
        assert!((set_distance(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(set_distance(&a, &a), 0.0);
    }

    #[test]
    fn set_distance_matches_pairwise_sampling() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = ConvexPolygon::rectangle(
                Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
                rng.random_range(1.0..4.0),
                rng.random_range(1.0..4.0),
                rng.random_range(0.0..PI),
            )
            .unwrap();
            let b = ConvexPolygon::rectangle(
                Vec2::new(rng.random_range(5.0..9.0), rng.random_range(-3.0..3.0)),
                rng.random_range(1.0..4.0),
                rng.random_range(1.0..4.0),
                rng.random_range(0.0..PI),
            )
            .unwrap();
            let samples = |p: &ConvexPolygon| -> Vec<Vec2> {
                let v = p.vertices();
                (0..4)
                    .flat_map(|i| {
                        let (s, e) = (v[i], v[(i + 1) % 4]);
                        (0..1000).map(move |k| s + (e - s) * (k as f64 / 1000.0))
                    })
                    .collect()
            };
            let (sa, sb) = (samples(&a), samples(&b));
            let oracle = sa
                .iter()
                .flat_map(|p| sb.iter().map(move |q| p.distance(*q)))
                .fold(f64::INFINITY, f64::min);
            let d = set_distance(&a, &b);
            assert!((d - oracle).abs() < 1e-3, "{d} vs {oracle}");
            assert_eq!(d, set_distance(&b, &a));
        }
    }

    #[test]
    fn cross_examples() {
        assert_eq!(cross_z(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)), 1.0);
        assert_eq!(cross_z(Vec2::new(2.0, 4.0), Vec2::new(1.0, 2.0)), 0.0);
        assert_eq!(cross_z(Vec2::new(2.0, 1.0), Vec2::new(1.0, 3.0)), 5.0);
    }

    #[test]
    fn rejects_reflex_and_degenerate_polygons() {
        let dart = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.0, 0.5),
            Vec2::new(-2.0, 1.0),
        ];
        assert!(matches!(
            ConvexPolygon::new(dart),
            Err(GeometryError::NotStrictlyConvex(_))
        ));
        let line = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)];
        assert!(ConvexPolygon::new(line).is_err());
        assert!(ConvexPolygon::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let cw = vec![Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)];
        let p = ConvexPolygon::new(cw).unwrap();
        assert!(p.area() > 0.0);
    }

    #[test]
    fn centroid_is_area_centroid() {
        // Triangle centroid is the vertex mean.
        let t = ConvexPolygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), Vec2::new(0.0, 3.0)]).unwrap();
        assert!(t.centroid().distance(Vec2::new(4.0 / 3.0, 1.0)) < 1e-12);
        let r = ConvexPolygon::rectangle(Vec2::new(15.0, 15.0), 30.0, 10.0, 3.0 * FRAC_PI_4).unwrap();
        assert!(r.centroid().distance(Vec2::new(15.0, 15.0)) < 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
    }

    fn rect_strategy() -> impl Strategy<Value = ConvexPolygon> {
        (-5.0..5.0f64, -5.0..5.0f64, 0.5..6.0f64, 0.5..6.0f64, 0.0..PI)
            .prop_map(|(x, y, w, h, a)| ConvexPolygon::rectangle(Vec2::new(x, y), w, h, a).unwrap())
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(poly in rect_strategy(), x in -20.0..20.0f64, y in -20.0..20.0f64) {
            let p = project_onto_boundary(Vec2::new(x, y), &poly);
            let pp = project_onto_boundary(p, &poly);
            prop_assert!(p.distance(pp) < 1e-9);
        }

        #[test]
        fn separation_is_one_lipschitz(
            poly in rect_strategy(),
            a in (-20.0..20.0f64, -20.0..20.0f64),
            b in (-20.0..20.0f64, -20.0..20.0f64),
        ) {
            let (qa, qb) = (Vec2::new(a.0, a.1), Vec2::new(b.0, b.1));
            prop_assume!(!poly.contains(qa) && !poly.contains(qb));
            let da = separation_vector(qa, &poly).unwrap().norm();
            let db = separation_vector(qb, &poly).unwrap().norm();
            prop_assert!((da - db).abs() <= qa.distance(qb) + 1e-12);
        }

        #[test]
        fn rotation_preserves_norm_and_composes(a in -10.0..10.0f64, b in -10.0..10.0f64, x in -50.0..50.0f64, y in -50.0..50.0f64) {
            let v = Vec2::new(x, y);
            let ra = Rotation::new(a);
            let rb = Rotation::new(b);
            let n = v.norm();
            prop_assert!((ra.apply(v).norm() - n).abs() <= 1e-12 * n.max(1.0));
            let seq = ra.apply(rb.apply(v));
            let joint = Rotation::new(a + b).apply(v);
            prop_assert!(seq.distance(joint) <= 1e-12 * n.max(1.0));
            prop_assert!(ra.compose(&rb).apply(v).distance(joint) <= 1e-12 * n.max(1.0));
        }

        #[test]
        fn quarter_rotation_is_perpendicular(x in -50.0..50.0f64, y in -50.0..50.0f64, pos in any::<bool>()) {
            let v = Vec2::new(x, y);
            let r = Rotation::quarter(pos).apply(v);
            prop_assert_eq!(r.dot(v), 0.0);
            prop_assert_eq!(r.norm(), v.norm());
        }
    }
}
