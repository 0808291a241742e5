//! Compactly supported repulsive potentials.
//!
//! Both the obstacle field and the same-type pair repulsion share the
//! profile `k/2 · (1/r − 1/r_cut)²` on `r ≤ r_cut` and zero beyond, so the
//! force `k (1/r − 1/r_cut) / r²` vanishes continuously at the cutoff and
//! diverges at contact. Below [`S_MIN`] the force magnitude is frozen at
//! its value there and the sample is flagged as singular.

use crate::error::FieldError;
use crate::geometry::{ConvexPolygon, Vec2};

/// Width of the singular band around obstacle boundaries and between agents.
pub const S_MIN: f64 = 1e-3;

#[inline]
fn profile_potential(k: f64, cutoff: f64, r: f64) -> f64 {
    if r > cutoff {
        return 0.0;
    }
    let g = 1.0 / r - 1.0 / cutoff;
    0.5 * k * g * g
}

#[inline]
fn profile_force(k: f64, cutoff: f64, r: f64) -> f64 {
    if r > cutoff {
        return 0.0;
    }
    k * (1.0 / r - 1.0 / cutoff) / (r * r)
}

/// Accumulated force with the number of clamped singular contributions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ForceSum {
    pub force: Vec2,
    pub singular: u32,
}

impl ForceSum {
    pub fn add(&mut self, force: Vec2, singular: bool) {
        self.force += force;
        self.singular += singular as u32;
    }
}

/// `−Σ_j ∇U_j(q)` over all obstacle fields, clamped inside the singular band.
pub fn obstacle_forces(q: Vec2, fields: &[ObstacleField]) -> Result<ForceSum, FieldError> {
    let mut out = ForceSum::default();
    for f in fields {
        let s = f.sample(q)?;
        out.add(s.force, s.singular);
    }
    Ok(out)
}

/// One evaluation of an obstacle field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// `−∇U`, pointing away from the obstacle.
    pub force: Vec2,
    /// `s(q) = q − proj(q)`.
    pub separation: Vec2,
    pub distance: f64,
    /// True when `distance < S_MIN` and the magnitude was clamped.
    pub singular: bool,
}

/// Repulsive potential attached to one convex obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleField {
    pub obstacle: ConvexPolygon,
    /// Influence radius `λ_o`.
    pub lambda_o: f64,
    /// Strength `k_o`.
    pub k_o: f64,
}

impl ObstacleField {
    pub fn new(obstacle: ConvexPolygon, lambda_o: f64, k_o: f64) -> Self {
        assert!(
            lambda_o > 0.0 && k_o > 0.0,
            "obstacle field needs positive radius and gain"
        );
        Self {
            obstacle,
            lambda_o,
            k_o,
        }
    }

    pub fn centroid(&self) -> Vec2 {
        self.obstacle.centroid()
    }

    /// Separation vector `s(q)`; errors for interior points.
    pub fn separation(&self, q: Vec2) -> Result<Vec2, FieldError> {
        Ok(crate::geometry::separation_vector(q, &self.obstacle)?)
    }

    pub fn potential(&self, q: Vec2) -> Result<f64, FieldError> {
        let d = self.separation(q)?.norm();
        Ok(profile_potential(self.k_o, self.lambda_o, d))
    }

    /// `−∇U(q)`. Errors inside the singular band.
    pub fn force(&self, q: Vec2) -> Result<Vec2, FieldError> {
        let sample = self.sample(q)?;
        if sample.singular {
            return Err(FieldError::SingularProximity {
                distance: sample.distance,
                s_min: S_MIN,
            });
        }
        Ok(sample.force)
    }

    /// `−∇U(q)` with the magnitude clamped inside the singular band.
    pub fn sample(&self, q: Vec2) -> Result<FieldSample, FieldError> {
        if self.obstacle.contains_strict(q) {
            return Err(crate::error::GeometryError::InsideObstacle { x: q.x, y: q.y }.into());
        }
        let bp = self.obstacle.project(q);
        let separation = q - bp.point;
        let distance = separation.norm();
        if distance > self.lambda_o {
            return Ok(FieldSample {
                force: Vec2::ZERO,
                separation,
                distance,
                singular: false,
            });
        }
        let singular = distance < S_MIN;
        let r = distance.max(S_MIN);
        let dir = if distance > 0.0 {
            separation / distance
        } else {
            self.obstacle.edge_normal(bp.edge)
        };
        Ok(FieldSample {
            force: dir * profile_force(self.k_o, self.lambda_o, r),
            separation,
            distance,
            singular,
        })
    }

    /// Mirror image across the x axis.
    pub fn mirror_x(&self) -> Self {
        Self {
            obstacle: self.obstacle.mirror_x(),
            ..*self
        }
    }
}

/// Short-range repulsion between two agents of the same type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRepulsion {
    pub k_d: f64,
    /// Cutoff distance `d_th`.
    pub d_th: f64,
}

impl PairRepulsion {
    pub fn potential(&self, qi: Vec2, qj: Vec2) -> f64 {
        profile_potential(self.k_d, self.d_th, qi.distance(qj))
    }

    /// Force on agent `i` from agent `j`, pointing away from `j`.
    pub fn force(&self, qi: Vec2, qj: Vec2) -> Result<Vec2, FieldError> {
        let (f, singular) = self.force_clamped(qi, qj);
        if singular {
            return Err(FieldError::SingularProximity {
                distance: qi.distance(qj),
                s_min: S_MIN,
            });
        }
        Ok(f)
    }

    /// Force with the magnitude clamped inside the singular band. Coincident
    /// agents get no force (no direction exists) but are still flagged.
    pub fn force_clamped(&self, qi: Vec2, qj: Vec2) -> (Vec2, bool) {
        let d = qi - qj;
        let r = d.norm();
        if r > self.d_th {
            return (Vec2::ZERO, false);
        }
        let singular = r < S_MIN;
        match d.normalized() {
            Some(dir) => (dir * profile_force(self.k_d, self.d_th, r.max(S_MIN)), singular),
            None => (Vec2::ZERO, true),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_field() -> ObstacleField {
        ObstacleField::new(ConvexPolygon::rectangle(Vec2::ZERO, 2.0, 2.0, 0.0).unwrap(), 2.5, 10.0)
    }

    #[test]
    fn potential_examples() {
        let f = square_field();
        assert_eq!(f.potential(Vec2::new(1.0 + 2.5, 0.0)).unwrap(), 0.0);
        let u = f.potential(Vec2::new(1.0 + 1.25, 0.0)).unwrap();
        assert!((u - 0.8).abs() < 1e-12, "{u}");
        assert_eq!(f.potential(Vec2::new(1.0 + 5.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn force_is_radial_and_zero_outside() {
        let f = square_field();
        assert_eq!(f.force(Vec2::new(4.0, 0.3)).unwrap(), Vec2::ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let q = Vec2::new(rng.random_range(-3.4..3.4), rng.random_range(-3.4..3.4));
            let Ok(s) = f.separation(q) else { continue };
            let d = s.norm();
            if !(0.05..=2.5).contains(&d) {
                continue;
            }
            let dir = f.force(q).unwrap().normalized().unwrap();
            assert!(dir.distance(s / d) < 1e-9);
        }
    }

    #[test]
    fn force_decreases_with_distance() {
        let f = square_field();
        let mut last = f64::INFINITY;
        for k in 1..=250 {
            let d = k as f64 * 0.01;
            let m = f.force(Vec2::new(1.0 + d, 0.0)).unwrap().norm();
            if d < 2.5 {
                assert!(m < last, "not decreasing at {d}");
            }
            last = m;
        }
    }

    #[test]
    fn continuity_at_cutoff() {
        let f = square_field();
        let q = Vec2::new(1.0 + 2.5 * (1.0 - 1e-6), 0.0);
        assert!(f.potential(q).unwrap() < 1e-10);
        assert!(f.force(q).unwrap().norm() < 1e-5);
    }

    #[test]
    fn singular_band_clamps_and_flags() {
        let f = square_field();
        let q = Vec2::new(1.0 + 5e-4, 0.0);
        assert!(matches!(f.force(q), Err(FieldError::SingularProximity { .. })));
        let s = f.sample(q).unwrap();
        assert!(s.singular);
        let at_band = profile_force(10.0, 2.5, S_MIN);
        assert!((s.force.norm() - at_band).abs() < 1e-6 * at_band);
        let on_boundary = f.sample(Vec2::new(1.0, 0.2)).unwrap();
        assert!(on_boundary.singular);
        assert!(on_boundary.force.normalized().unwrap().distance(Vec2::new(1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn inside_is_an_error() {
        let f = square_field();
        assert!(matches!(f.potential(Vec2::new(0.5, 0.5)), Err(FieldError::Geometry(_))));
    }

    #[test]
    fn pair_force_cutoff_and_antisymmetry() {
        let rep = PairRepulsion { k_d: 1.0, d_th: 0.45 };
        assert_eq!(rep.force(Vec2::ZERO, Vec2::new(0.45, 0.0)).unwrap(), Vec2::ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let a = Vec2::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
            let b = Vec2::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
            if a.distance(b) < 0.01 {
                continue;
            }
            let fab = rep.force(a, b).unwrap();
            let fba = rep.force(b, a).unwrap();
            assert!((fab + fba).norm() <= 1e-12 * fab.norm().max(1.0));
            assert!(fab.dot(a - b) >= 0.0);
        }
    }

    #[test]
    fn pair_force_matches_finite_difference() {
        let rep = PairRepulsion { k_d: 1.0, d_th: 0.45 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for _ in 0..300 {
            let r = rng.random_range(0.045..0.43);
            let ang = rng.random_range(0.0..std::f64::consts::TAU);
            let qi = Vec2::from_angle(ang) * r;
            let qj = Vec2::ZERO;
            let f = rep.force(qi, qj).unwrap();
            let gx =
                (rep.potential(qi + Vec2::new(h, 0.0), qj) - rep.potential(qi - Vec2::new(h, 0.0), qj)) / (2.0 * h);
            let gy =
                (rep.potential(qi + Vec2::new(0.0, h), qj) - rep.potential(qi - Vec2::new(0.0, h), qj)) / (2.0 * h);
            let fd = -Vec2::new(gx, gy);
            assert!((f - fd).norm() / f.norm() < 1e-5, "r={r}");
        }
    }
}
