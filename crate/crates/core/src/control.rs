//! Herder control law.
//!
//! Each step runs in two passes over an immutable snapshot of all agent
//! positions: a global target-selection reduction ([`select_targets`]),
//! then an independent per-herder composition ([`compose_ideal`] for point
//! agents, [`compose_embodied`] for robots with orbiting and same-type
//! repulsion).
//!
//! A herder that owns no target returns to the goal disc at constant speed.
//! A herder chasing target `T*` tracks the steering point
//! `C = T* + δ(μ·T̂* + (1−μ)·ν̂)`: straight behind the target as seen from
//! the goal when the way is clear (`μ = 1`), or beside it along the
//! obstacle boundary tangent `ν̂` when an obstacle blocks the way (`μ = 0`).
//! Near obstacles the herder is repelled by a blend of the normal
//! obstacle force and its `±π/2` rotation, so it slides around obstacles
//! instead of stalling against them.
//!
//! The goal disc is centered at the origin throughout.

use std::f64::consts::FRAC_PI_2;

use crate::error::ControlError;
use crate::geometry::{cross_z, signed_angle, ConvexPolygon, Rotation, Vec2};
use crate::potential::{ForceSum, ObstacleField, PairRepulsion};

/// Goal region center.
pub const GOAL_CENTER: Vec2 = Vec2::ZERO;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HerderParams {
    /// Maximum speed `v_H`.
    pub v_h: f64,
    /// Attraction gain toward the steering point.
    pub alpha: f64,
    /// Steering-point offset `δ`, must be below the target influence radius.
    pub delta: f64,
    /// Normal/tangential blend of the herder obstacle force, in `[0, 1]`.
    pub gamma: f64,
    /// Goal radius `ρ_g`.
    pub rho_g: f64,
    /// Obstacle safety margin `ε_o`.
    pub epsilon_o: f64,
}

/// Orbiting parameters of the embodied herder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitParams {
    pub alpha_o: f64,
    pub alpha_r: f64,
    pub r_th: f64,
    pub epsilon_h: f64,
    /// Dead-band angle below which no orbiting happens.
    pub beta_orb: f64,
    /// Angle above which orbiting is fully active.
    pub beta_th: f64,
}

/// Per-herder state of the control law for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HerderDecision {
    /// Chasing flag `η`.
    pub eta: bool,
    pub selected_target: Option<usize>,
    /// Straight push (`true`) or tangential push (`false`).
    pub mu: bool,
    pub steering_point: Vec2,
    pub sigma: f64,
    pub zeta: f64,
    pub psi: f64,
    pub command: Vec2,
    /// The raw command exceeded `v_H` and was rescaled.
    pub saturated: bool,
    /// Clamped singular force samples used by this herder.
    pub singular: u32,
}

impl Default for HerderDecision {
    fn default() -> Self {
        Self {
            eta: false,
            selected_target: None,
            mu: true,
            steering_point: GOAL_CENTER,
            sigma: 0.0,
            zeta: 0.0,
            psi: 1.0,
            command: Vec2::ZERO,
            saturated: false,
            singular: 0,
        }
    }
}

/// Positions of every agent and the obstacle fields, frozen for one step.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    pub herders: &'a [Vec2],
    pub targets: &'a [Vec2],
    pub fields: &'a [ObstacleField],
}

/// Assigns each herder the uncaptured target farthest from the goal among
/// those for which it is the nearest herder. Ties go to the smallest index,
/// so no target is ever assigned twice.
pub fn select_targets(herders: &[Vec2], targets: &[Vec2], rho_g: f64) -> Vec<Option<usize>> {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; herders.len()];
    if herders.is_empty() {
        return Vec::new();
    }
    for (a, &t) in targets.iter().enumerate() {
        let radius = (t - GOAL_CENTER).norm();
        if radius <= rho_g {
            continue;
        }
        let mut owner = 0;
        let mut owner_d = f64::INFINITY;
        for (i, &h) in herders.iter().enumerate() {
            let d = (h - t).norm_squared();
            if d < owner_d {
                owner_d = d;
                owner = i;
            }
        }
        match best[owner] {
            Some((_, r)) if r >= radius => {}
            _ => best[owner] = Some((a, radius)),
        }
    }
    best.into_iter().map(|b| b.map(|(a, _)| a)).collect()
}

/// Constant-speed return toward the goal center while outside the goal disc.
pub fn return_to_goal(h: Vec2, p: &HerderParams) -> Vec2 {
    let rel = h - GOAL_CENTER;
    if rel.norm() <= p.rho_g {
        return Vec2::ZERO;
    }
    match rel.normalized() {
        Some(dir) => -dir * p.v_h,
        None => Vec2::ZERO,
    }
}

/// Hybrid normal/tangential obstacle force on a herder. The tangential part
/// turns toward the side of each obstacle on which the steering point lies.
pub fn herder_obstacle_force(
    h: Vec2,
    steering_point: Vec2,
    fields: &[ObstacleField],
    gamma: f64,
) -> Result<ForceSum, ControlError> {
    let mut out = ForceSum::default();
    for field in fields {
        let sample = field.sample(h)?;
        if sample.force == Vec2::ZERO && !sample.singular {
            continue;
        }
        let normal = sample.force;
        let mut f = normal * gamma;
        if gamma < 1.0 {
            let p = field.centroid();
            let rot = Rotation::quarter(cross_z(h - p, steering_point - p) > 0.0);
            f += rot.apply(normal) * (1.0 - gamma);
        }
        out.add(f, sample.singular);
    }
    Ok(out)
}

/// Index of the obstacle whose boundary is nearest to `q` with that
/// distance; ties go to the smallest index.
pub fn nearest_obstacle(q: Vec2, fields: &[ObstacleField]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (j, f) in fields.iter().enumerate() {
        let d = f.obstacle.distance_to_solid(q);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    best
}

/// Unit tangent to the obstacle boundary at the target, oriented so that a
/// push along `−ν̂` carries the target around the obstacle on the side
/// facing the goal.
pub fn boundary_tangent(target: Vec2, obstacle: &ConvexPolygon, goal_center: Vec2) -> Result<Vec2, ControlError> {
    let s = crate::geometry::separation_vector(target, obstacle)?;
    let s = if s == Vec2::ZERO {
        obstacle.edge_normal(obstacle.project(target).edge)
    } else {
        s
    };
    let p = obstacle.centroid();
    let nu = if cross_z(target - p, goal_center - p) > 0.0 {
        Rotation::quarter(false).apply(s)
    } else {
        Rotation::quarter(true).apply(s)
    };
    nu.normalized()
        .ok_or(ControlError::DegenerateDirection("boundary tangent"))
}

/// Steering term `−α(h − C)` and the steering point `C`.
pub fn steering_term(
    h: Vec2,
    target: Vec2,
    mu: bool,
    nu_hat: Vec2,
    p: &HerderParams,
) -> Result<(Vec2, Vec2), ControlError> {
    let offset = if mu {
        (target - GOAL_CENTER)
            .normalized()
            .ok_or(ControlError::DegenerateDirection("target at goal center"))?
    } else {
        nu_hat
    };
    let c = target + offset * p.delta;
    Ok((-(h - c) * p.alpha, c))
}

/// Straight push (`true`) unless the nearest obstacle is within
/// `λ_o + ε_o` of the target and blocks the segment from the target to the
/// goal center (segment passing within `ε_o` of the obstacle).
pub fn mu_switch(target: Vec2, fields: &[ObstacleField], goal_center: Vec2, lambda_o: f64, epsilon_o: f64) -> bool {
    let Some((j, d)) = nearest_obstacle(target, fields) else {
        return true;
    };
    if d > lambda_o + epsilon_o {
        return true;
    }
    let blocked = fields[j].obstacle.segment_distance_to_solid(target, goal_center) <= epsilon_o;
    !blocked
}

/// Orbiting modulation for an embodied herder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitWeights {
    pub sigma: f64,
    pub zeta: f64,
    pub psi: f64,
    pub phi: f64,
}

/// Distance ramp: 1 within `r_th`, 0 beyond `r_th + ε_h`, linear between.
pub fn sigma_ramp(distance: f64, op: &OrbitParams) -> f64 {
    if distance >= op.r_th + op.epsilon_h {
        0.0
    } else if distance <= op.r_th {
        1.0
    } else {
        (op.r_th + op.epsilon_h - distance) / op.epsilon_h
    }
}

/// Angle ramp: 0 below `β_orb`, 1 above `β_th`, linear between.
pub fn zeta_ramp(angle: f64, op: &OrbitParams) -> f64 {
    let a = angle.abs();
    if a <= op.beta_orb {
        0.0
    } else if a >= op.beta_th {
        1.0
    } else {
        (a - op.beta_orb) / (op.beta_th - op.beta_orb)
    }
}

/// Orbit weights `σ, ζ`, direction `φ` and obstacle-driven reversal `ψ`.
/// The reversal only applies while the target is within `λ_o + ε_o` of its
/// nearest obstacle.
pub fn orbit_weights(
    h: Vec2,
    target: Vec2,
    steering_point: Vec2,
    fields: &[ObstacleField],
    op: &OrbitParams,
    proximity: f64,
) -> OrbitWeights {
    let d_ht = h - target;
    let d_ct = steering_point - target;
    let phi = if cross_z(d_ht, d_ct) >= 0.0 {
        FRAC_PI_2
    } else {
        -FRAC_PI_2
    };
    let beta = signed_angle(d_ht, d_ct);
    let mut psi = 1.0;
    if beta.abs() > FRAC_PI_2 {
        if let Some((j, d)) = nearest_obstacle(target, fields) {
            if d <= proximity {
                let s = target - fields[j].obstacle.project(target).point;
                if signed_angle(-s, d_ht).abs() < FRAC_PI_2 {
                    psi = -1.0;
                }
            }
        }
    }
    OrbitWeights {
        sigma: sigma_ramp(d_ht.norm(), op),
        zeta: zeta_ramp(beta, op),
        psi,
        phi,
    }
}

/// Tangential circulation around the target plus radial regulation of the
/// herder–target distance toward `r_th`.
pub fn orbit_velocity(h: Vec2, target: Vec2, w: &OrbitWeights, op: &OrbitParams) -> Result<Vec2, ControlError> {
    let d = h - target;
    let dist = d.norm();
    let dir = d
        .normalized()
        .ok_or(ControlError::DegenerateDirection("herder on its target"))?;
    let rot = Rotation::quarter(w.psi * w.phi > 0.0);
    Ok(rot.apply(dir) * op.alpha_o + dir * (op.alpha_r * (1.0 - dist / op.r_th)))
}

/// Terms shared by both control laws.
#[derive(Debug, Clone, Copy)]
struct SteeringParts {
    decision: HerderDecision,
    /// `(1−η)F` or `ηI'`, whichever is active.
    goal_term: Vec2,
    obstacle: ForceSum,
}

fn steering_parts(
    i: usize,
    snap: &Snapshot<'_>,
    selected: Option<usize>,
    p: &HerderParams,
    lambda_o: f64,
) -> Result<SteeringParts, ControlError> {
    let h = snap.herders[i];
    let mut decision = HerderDecision {
        selected_target: selected,
        eta: selected.is_some(),
        ..HerderDecision::default()
    };
    let goal_term = match selected {
        None => return_to_goal(h, p),
        Some(a) => {
            let t = snap.targets[a];
            let mu = mu_switch(t, snap.fields, GOAL_CENTER, lambda_o, p.epsilon_o);
            let nu_hat = if mu {
                Vec2::ZERO
            } else {
                let (j, _) = nearest_obstacle(t, snap.fields).expect("tangential push needs an obstacle");
                boundary_tangent(t, &snap.fields[j].obstacle, GOAL_CENTER)?
            };
            let (term, c) = steering_term(h, t, mu, nu_hat, p)?;
            decision.mu = mu;
            decision.steering_point = c;
            term
        }
    };
    let obstacle = herder_obstacle_force(h, decision.steering_point, snap.fields, p.gamma)?;
    Ok(SteeringParts {
        decision,
        goal_term,
        obstacle,
    })
}

fn finish(mut decision: HerderDecision, raw: Vec2, singular: u32, v_h: f64) -> HerderDecision {
    let (command, saturated) = raw.clamp_norm(v_h);
    decision.command = command;
    decision.saturated = saturated;
    decision.singular = singular;
    decision
}

/// Point-herder control `u = (1−η)F + ηI' + F^H`, saturated to `v_H`.
pub fn compose_ideal(
    i: usize,
    snap: &Snapshot<'_>,
    selected: Option<usize>,
    p: &HerderParams,
    lambda_o: f64,
) -> Result<HerderDecision, ControlError> {
    let parts = steering_parts(i, snap, selected, p, lambda_o)?;
    let raw = parts.goal_term + parts.obstacle.force;
    Ok(finish(parts.decision, raw, parts.obstacle.singular, p.v_h))
}

/// Robot-herder control
/// `ũ = (1−η)F + (1−σ)ηI' + F^H + Σ_j G_ij + σζp`, saturated to `v_H`.
pub fn compose_embodied(
    i: usize,
    snap: &Snapshot<'_>,
    selected: Option<usize>,
    p: &HerderParams,
    lambda_o: f64,
    op: &OrbitParams,
    rep: &PairRepulsion,
) -> Result<HerderDecision, ControlError> {
    let parts = steering_parts(i, snap, selected, p, lambda_o)?;
    let h = snap.herders[i];
    let mut decision = parts.decision;
    let mut singular = parts.obstacle.singular;
    let mut raw = parts.obstacle.force;

    for (j, &other) in snap.herders.iter().enumerate() {
        if j != i {
            let (f, s) = rep.force_clamped(h, other);
            raw += f;
            singular += s as u32;
        }
    }

    match selected {
        None => raw += parts.goal_term,
        Some(a) => {
            let t = snap.targets[a];
            let w = orbit_weights(h, t, decision.steering_point, snap.fields, op, lambda_o + p.epsilon_o);
            decision.sigma = w.sigma;
            decision.zeta = w.zeta;
            decision.psi = w.psi;
            raw += parts.goal_term * (1.0 - w.sigma);
            let gate = w.sigma * w.zeta;
            if gate > 0.0 {
                raw += orbit_velocity(h, t, &w, op)? * gate;
            }
        }
    }
    Ok(finish(decision, raw, singular, p.v_h))
}
