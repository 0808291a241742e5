//! Target velocity fields.
//!
//! Targets are non-cohesive: they only react to herders inside their
//! influence radius, to nearby obstacles and (embodied model) to
//! same-type neighbors. They have no drive toward the goal.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::FieldError;
use crate::geometry::Vec2;
use crate::potential::{obstacle_forces, ForceSum, ObstacleField, PairRepulsion};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetParams {
    /// Herder influence radius `λ`.
    pub lambda: f64,
    /// Repulsive drift strength `β`.
    pub beta: f64,
    /// Diffusion coefficient `D` (m²/s).
    pub diffusion: f64,
    pub lambda_o: f64,
    pub k_o: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetState {
    pub position: Vec2,
    /// Heading, only meaningful for differential-drive targets.
    pub heading: f64,
    /// Inside the goal disc at the last metric update.
    pub captured: bool,
}

impl TargetState {
    pub fn at(position: Vec2) -> Self {
        Self {
            position,
            heading: 0.0,
            captured: false,
        }
    }
}

/// Indices of herders strictly closer than `lambda`.
pub fn neighbor_herders(target: Vec2, herders: &[Vec2], lambda: f64) -> Vec<usize> {
    herders
        .iter()
        .enumerate()
        .filter(|(_, h)| h.distance(target) < lambda)
        .map(|(i, _)| i)
        .collect()
}

/// Deterministic drift of a target: herder repulsion plus obstacle repulsion.
pub fn drift(
    target: Vec2,
    herders: &[Vec2],
    fields: &[ObstacleField],
    p: &TargetParams,
) -> Result<ForceSum, FieldError> {
    let mut out = obstacle_forces(target, fields)?;
    for &h in herders {
        let away = target - h;
        let d = away.norm();
        if d < p.lambda {
            // A herder sitting exactly on the target exerts no directed push.
            if let Some(dir) = away.normalized() {
                out.force += dir * (p.beta * (p.lambda - d));
            }
        }
    }
    Ok(out)
}

/// Noise-free drift of target `a` with same-type pair repulsion added.
pub fn embodied_drift(
    a: usize,
    targets: &[Vec2],
    herders: &[Vec2],
    fields: &[ObstacleField],
    p: &TargetParams,
    rep: &PairRepulsion,
) -> Result<ForceSum, FieldError> {
    let mut out = drift(targets[a], herders, fields, p)?;
    for (j, &other) in targets.iter().enumerate() {
        if j == a {
            continue;
        }
        let (f, singular) = rep.force_clamped(targets[a], other);
        out.add(f, singular);
    }
    Ok(out)
}

/// Brownian increment `√(2D)·ΔW` over one step: each component is
/// Gaussian with standard deviation `√(2·D·dt)`.
pub fn noise_increment<R: Rng + ?Sized>(rng: &mut R, diffusion: f64, dt: f64) -> Vec2 {
    if diffusion == 0.0 {
        return Vec2::ZERO;
    }
    let std = (2.0 * diffusion * dt).sqrt();
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Vec2::new(x * std, y * std)
}
