//! Differential-drive realization of single-integrator commands.

use crate::geometry::{wrap_angle, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicycleParams {
    /// Look-ahead distance of the mapping.
    pub d: f64,
    /// Wheelbase.
    pub l: f64,
    /// Per-wheel speed limit.
    pub v_max: f64,
    /// Division guard in the wheel scaling.
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub position: Vec2,
    /// Heading in `(−π, π]`.
    pub heading: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
        }
    }
}

/// Nominal `(v, ω)` from a planar velocity command.
pub fn map_to_unicycle(u: Vec2, pose: &Pose, up: &UnicycleParams) -> (f64, f64) {
    let (s, c) = pose.heading.sin_cos();
    (c * u.x + s * u.y, (-s * u.x + c * u.y) / up.d)
}

/// Inverse of [`map_to_unicycle`].
pub fn unicycle_to_planar(v: f64, w: f64, pose: &Pose, up: &UnicycleParams) -> Vec2 {
    let (s, c) = pose.heading.sin_cos();
    let wd = w * up.d;
    Vec2::new(c * v - s * wd, s * v + c * wd)
}

/// Uniform scaling so that both wheel speeds `|v ± lω/2|` stay within
/// `v_max`; returns the scaled `(v, ω)` and the factor applied.
pub fn scale_wheels(v: f64, w: f64, up: &UnicycleParams) -> (f64, f64, f64) {
    let half = up.l / 2.0 * w;
    let s = 1.0_f64
        .min(up.v_max / ((v + half).abs() + up.epsilon))
        .min(up.v_max / ((v - half).abs() + up.epsilon));
    (s * v, s * w, s)
}

/// Left and right wheel speeds `(v − lω/2, v + lω/2)`.
pub fn wheel_speeds(v: f64, w: f64, up: &UnicycleParams) -> (f64, f64) {
    let half = up.l / 2.0 * w;
    (v - half, v + half)
}

/// Forward-Euler unicycle update.
pub fn step_unicycle(pose: &Pose, v: f64, w: f64, dt: f64) -> Pose {
    let (s, c) = pose.heading.sin_cos();
    Pose::new(pose.position + Vec2::new(c, s) * (v * dt), pose.heading + w * dt)
}
