//! Time-stepped simulation.
//!
//! Each step works on a frozen snapshot of all positions: targets are
//! assigned, every herder command and every target drift is computed from
//! the snapshot, then all agents advance together by explicit Euler
//! (Euler–Maruyama for noisy targets). Agents that land inside an obstacle
//! are projected back out and the event is counted.
//!
//! Randomness comes from one ChaCha8 generator per purpose, all keyed by
//! the master seed: stream 0 places obstacles and agents, stream `1 + a`
//! drives the noise of target `a`. Results therefore do not depend on
//! thread scheduling or on which other runs share a batch.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baseline::{self, OccupancyGrid};
use crate::control::{self, HerderDecision, Snapshot, GOAL_CENTER};
use crate::embodiment::{self, Pose};
use crate::error::{EngineError, PlanError};
use crate::geometry::{set_distance, Vec2};
use crate::potential::{ObstacleField, S_MIN};
use crate::scenario::{AgentSpec, Mode, ObstacleSpec, ScenarioConfig};
use crate::targets::{self, TargetState};
use crate::trace::{AgentKind, Trace, TraceRecord};

const MAX_ATTEMPTS: usize = 10_000;

/// Extra target velocity injected by tests (e.g. an artificial cohesion
/// term); receives the target index and the snapshot of target positions.
pub type TargetHook<'a> = &'a (dyn Fn(usize, &[Vec2]) -> Vec2 + Sync);

/// Obstacles and initial agent poses of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub obstacles: Vec<ObstacleSpec>,
    pub herders: Vec<Pose>,
    pub targets: Vec<Pose>,
}

fn placement_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

fn noise_rng(seed: u64, target: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 + target as u64);
    rng
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo < hi {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn point_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> Vec2 {
    let r = radius * rng.random::<f64>().sqrt();
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    Vec2::from_angle(a) * r
}

fn clear_of_obstacles(q: Vec2, obstacles: &[ObstacleSpec], margin: f64) -> bool {
    obstacles
        .iter()
        .all(|o| o.polygon().map(|p| p.distance_to_solid(q) > margin).unwrap_or(false))
}

/// Draws the generated obstacles and the agents without explicit starts.
/// Headings are drawn in every mode so that all modes see the same
/// positions for a given seed.
pub fn build_scene(cfg: &ScenarioConfig) -> Result<Scene, EngineError> {
    let mut rng = placement_rng(cfg.seed);
    let mut obstacles = cfg.obstacles.clone();
    let clearance = cfg.obstacle_clearance();
    for k in 0..cfg.random_obstacles {
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS {
            let spec = ObstacleSpec {
                width: uniform(&mut rng, cfg.obstacle_width_min, cfg.obstacle_width_max),
                height: uniform(&mut rng, cfg.obstacle_height_min, cfg.obstacle_height_max),
                center: point_in_disc(&mut rng, cfg.rho_0),
                angle: rng.random_range(0.0..std::f64::consts::PI),
            };
            let poly = spec.polygon().map_err(|e| EngineError::Generator(e.to_string()))?;
            if poly.distance_to_solid(GOAL_CENTER) <= cfg.rho_g {
                continue;
            }
            let separated = obstacles.iter().all(|o| {
                o.polygon()
                    .map(|p| set_distance(&p, &poly) > clearance)
                    .unwrap_or(false)
            });
            if separated {
                obstacles.push(spec);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(EngineError::Generator(format!(
                "could not place obstacle {k} after {MAX_ATTEMPTS} attempts"
            )));
        }
    }

    let mut place = |explicit: &[AgentSpec], n: u64, kind: &str| -> Result<Vec<Pose>, EngineError> {
        let mut out: Vec<Pose> = Vec::with_capacity(n as usize);
        for i in 0..n as usize {
            if let Some(a) = explicit.get(i) {
                out.push(Pose::new(a.position, a.heading.unwrap_or(0.0)));
                continue;
            }
            let mut found = None;
            for _ in 0..MAX_ATTEMPTS {
                let q = point_in_disc(&mut rng, cfg.rho_0);
                let heading = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                let spaced = cfg.mode != Mode::Embodied || out.iter().all(|p| p.position.distance(q) >= cfg.d_th);
                if spaced && clear_of_obstacles(q, &obstacles, cfg.epsilon_o) {
                    found = Some(Pose::new(q, heading));
                    break;
                }
            }
            out.push(found.ok_or_else(|| {
                EngineError::Generator(format!("could not place {kind} {i} after {MAX_ATTEMPTS} attempts"))
            })?);
        }
        Ok(out)
    };
    let herders = place(&cfg.herders, cfg.n_herders, "herder")?;
    let targets = place(&cfg.targets, cfg.n_targets, "target")?;
    Ok(Scene {
        obstacles,
        herders,
        targets,
    })
}

/// The config with every generated element written out explicitly.
pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<ScenarioConfig, EngineError> {
    let scene = build_scene(cfg)?;
    let mut out = cfg.clone();
    out.random_obstacles = 0;
    out.obstacles = scene.obstacles;
    let spec = |p: &Pose| AgentSpec {
        position: p.position,
        heading: Some(p.heading),
    };
    out.herders = scene.herders.iter().map(spec).collect();
    out.targets = scene.targets.iter().map(spec).collect();
    Ok(out)
}

/// Violations of the scene rules: obstacle influence zones must not
/// overlap and every agent must start outside the inflated obstacles.
pub fn scene_violations(cfg: &ScenarioConfig, scene: &Scene) -> Vec<String> {
    let mut out = Vec::new();
    let mut polys = Vec::new();
    for (i, o) in scene.obstacles.iter().enumerate() {
        match o.polygon() {
            Ok(p) => polys.push((i, p)),
            Err(e) => out.push(format!("obstacle {i}: {e}")),
        }
    }
    let clearance = cfg.obstacle_clearance();
    for (a, (i, pi)) in polys.iter().enumerate() {
        for (j, pj) in polys.iter().skip(a + 1) {
            let d = set_distance(pi, pj);
            if d <= clearance {
                out.push(format!(
                    "obstacles {i} and {j} are {d:.4} m apart, need more than {clearance:.4} m"
                ));
            }
        }
    }
    for (kind, poses) in [("herder", &scene.herders), ("target", &scene.targets)] {
        for (a, p) in poses.iter().enumerate() {
            for (i, poly) in &polys {
                let d = poly.distance_to_solid(p.position);
                if d <= cfg.epsilon_o {
                    out.push(format!(
                        "{kind} {a} starts {d:.4} m from obstacle {i}, inside its {} m margin",
                        cfg.epsilon_o
                    ));
                }
            }
        }
    }
    out
}

/// Full check: parameter bounds, generator success and scene rules.
pub fn validate_scenario(cfg: &ScenarioConfig) -> Result<(), Vec<String>> {
    if let Err(crate::error::ConfigError::Validation(v)) = cfg.validate() {
        return Err(v);
    }
    let scene = build_scene(cfg).map_err(|e| vec![e.to_string()])?;
    let v = scene_violations(cfg, &scene);
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EventCounts {
    /// Force evaluations clamped inside the singular band.
    pub singular: u64,
    /// Agents projected back out of an obstacle.
    pub penetrations: u64,
    /// Herder commands clipped to `v_H`.
    pub saturations: u64,
    /// Baseline replans that found no path.
    pub no_path: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub t: f64,
    pub chi: f64,
    pub herder_mean: f64,
    pub herder_std: f64,
    pub target_mean: f64,
    pub target_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub samples: Vec<MetricSample>,
    /// First time every target was inside the goal.
    pub t_all_captured: Option<f64>,
    pub final_time: f64,
    pub final_chi: f64,
    /// Full capture persisted for the hold window when the run ended.
    pub held: bool,
    pub events: EventCounts,
    /// Largest wheel speed commanded to any differential-drive agent.
    pub max_wheel_speed: f64,
    /// Smallest agent-to-obstacle distance seen after any step.
    pub min_clearance: f64,
    pub steps: u64,
}

impl RunMetrics {
    pub fn chi_series(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, s.chi)).collect()
    }
}

/// Mean and population standard deviation of distances to the goal center.
pub fn radius_stats(points: impl Iterator<Item = Vec2>) -> (f64, f64) {
    let r: Vec<f64> = points.map(|p| (p - GOAL_CENTER).norm()).collect();
    if r.is_empty() {
        return (0.0, 0.0);
    }
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let var = r.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Fraction of targets within `rho_g` of the goal center; 1 when there are
/// no targets.
pub fn capture_fraction(targets: impl Iterator<Item = Vec2>, rho_g: f64) -> f64 {
    let (mut n, mut inside) = (0usize, 0usize);
    for t in targets {
        n += 1;
        inside += ((t - GOAL_CENTER).norm() <= rho_g) as usize;
    }
    if n == 0 {
        1.0
    } else {
        inside as f64 / n as f64
    }
}

#[derive(Debug, Clone)]
pub struct WorldState {
    pub step: u64,
    pub dt: f64,
    pub herders: Vec<Pose>,
    pub targets: Vec<TargetState>,
    pub decisions: Vec<HerderDecision>,
}

impl WorldState {
    /// `step × dt`, never accumulated.
    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn herder_positions(&self) -> Vec<Vec2> {
        self.herders.iter().map(|p| p.position).collect()
    }

    pub fn target_positions(&self) -> Vec<Vec2> {
        self.targets.iter().map(|t| t.position).collect()
    }
}

struct BaselinePlanner {
    grid: OccupancyGrid,
    path: Vec<Vec2>,
    next_replan: u64,
    replan_steps: u64,
}

pub struct Simulation {
    cfg: ScenarioConfig,
    fields: Vec<ObstacleField>,
    world: WorldState,
    rngs: Vec<ChaCha8Rng>,
    planner: Option<BaselinePlanner>,
    events: EventCounts,
    max_wheel_speed: f64,
    min_clearance: f64,
    t_all_captured: Option<f64>,
    full_since: Option<u64>,
    chi: f64,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self, EngineError> {
        if let Err(crate::error::ConfigError::Validation(v)) = cfg.validate() {
            return Err(EngineError::Validation(v));
        }
        let scene = build_scene(cfg)?;
        let violations = scene_violations(cfg, &scene);
        if !violations.is_empty() {
            return Err(EngineError::Validation(violations));
        }
        Self::from_scene(cfg, scene)
    }

    /// Starts from a given scene without re-checking it.
    pub fn from_scene(cfg: &ScenarioConfig, scene: Scene) -> Result<Self, EngineError> {
        let fields = scene
            .obstacles
            .iter()
            .map(|o| {
                o.polygon()
                    .map(|p| ObstacleField::new(p, cfg.lambda_o, cfg.k_o))
                    .map_err(|e| EngineError::Validation(vec![e.to_string()]))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let targets: Vec<TargetState> = scene
            .targets
            .iter()
            .map(|p| TargetState {
                position: p.position,
                heading: p.heading,
                captured: (p.position - GOAL_CENTER).norm() <= cfg.rho_g,
            })
            .collect();
        let planner = (cfg.mode == Mode::Baseline).then(|| {
            let half = cfg.rho_0 * 1.5 + cfg.inflation + cfg.arc_radius;
            let polys: Vec<_> = fields.iter().map(|f| f.obstacle.clone()).collect();
            BaselinePlanner {
                grid: baseline::rasterize(
                    &polys,
                    (Vec2::new(-half, -half), Vec2::new(half, half)),
                    cfg.grid_resolution,
                    cfg.inflation,
                ),
                path: Vec::new(),
                next_replan: 0,
                replan_steps: ((cfg.replan_interval / cfg.dt).round() as u64).max(1),
            }
        });
        let rngs = (0..targets.len()).map(|a| noise_rng(cfg.seed, a)).collect();
        let mut sim = Simulation {
            cfg: cfg.clone(),
            fields,
            world: WorldState {
                step: 0,
                dt: cfg.dt,
                decisions: vec![HerderDecision::default(); scene.herders.len()],
                herders: scene.herders,
                targets,
            },
            rngs,
            planner,
            events: EventCounts::default(),
            max_wheel_speed: 0.0,
            min_clearance: f64::INFINITY,
            t_all_captured: None,
            full_since: None,
            chi: 0.0,
        };
        sim.update_capture();
        Ok(sim)
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn fields(&self) -> &[ObstacleField] {
        &self.fields
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn events(&self) -> EventCounts {
        self.events
    }

    /// Full capture has persisted for the hold window.
    pub fn holding(&self) -> bool {
        self.full_since
            .is_some_and(|s| self.world.step - s >= self.cfg.hold_steps())
    }

    fn update_capture(&mut self) {
        let rho_g = self.cfg.rho_g;
        for t in &mut self.world.targets {
            t.captured = (t.position - GOAL_CENTER).norm() <= rho_g;
        }
        self.chi = capture_fraction(self.world.targets.iter().map(|t| t.position), rho_g);
        if self.chi == 1.0 {
            if self.t_all_captured.is_none() {
                self.t_all_captured = Some(self.world.time());
            }
            self.full_since.get_or_insert(self.world.step);
        } else {
            self.full_since = None;
        }
    }

    pub fn step(&mut self) -> Result<(), EngineError> {
        self.step_with(None)
    }

    pub fn step_with(&mut self, hook: Option<TargetHook<'_>>) -> Result<(), EngineError> {
        let herder_pos = self.world.herder_positions();
        let target_pos = self.world.target_positions();
        let baseline = match self.cfg.mode {
            Mode::Baseline => Some(self.baseline_decisions(&herder_pos, &target_pos)),
            _ => None,
        };
        let cfg = &self.cfg;
        let dt = cfg.dt;
        let snap = Snapshot {
            herders: &herder_pos,
            targets: &target_pos,
            fields: &self.fields,
        };

        // Herder commands.
        let decisions: Vec<HerderDecision> = match cfg.mode {
            Mode::Ideal | Mode::Embodied => {
                let selected = control::select_targets(&herder_pos, &target_pos, cfg.rho_g);
                let hp = cfg.herder_params();
                let (op, rep) = (cfg.orbit_params(), cfg.repulsion());
                selected
                    .iter()
                    .enumerate()
                    .map(|(i, &sel)| match cfg.mode {
                        Mode::Embodied => control::compose_embodied(i, &snap, sel, &hp, cfg.lambda_o, &op, &rep),
                        _ => control::compose_ideal(i, &snap, sel, &hp, cfg.lambda_o),
                    })
                    .collect::<Result<_, _>>()?
            }
            Mode::Baseline => baseline.unwrap_or_default(),
        };

        // Target velocities.
        let tp = cfg.target_params();
        let rep = cfg.repulsion();
        let mut target_vel = Vec::with_capacity(target_pos.len());
        for a in 0..target_pos.len() {
            let d = match cfg.mode {
                Mode::Embodied => targets::embodied_drift(a, &target_pos, &herder_pos, &self.fields, &tp, &rep),
                _ => targets::drift(target_pos[a], &herder_pos, &self.fields, &tp),
            }
            .map_err(|e| EngineError::Control(e.into()))?;
            self.events.singular += d.singular as u64;
            let mut v = d.force;
            if let Some(h) = hook {
                v += h(a, &target_pos);
            }
            target_vel.push(v);
        }

        // Commit.
        let time = (self.world.step + 1) as f64 * dt;
        let differential = cfg.mode != Mode::Ideal;
        let up = cfg.unicycle_params();
        for (i, d) in decisions.iter().enumerate() {
            self.events.singular += d.singular as u64;
            self.events.saturations += d.saturated as u64;
            let pose = self.world.herders[i];
            self.world.herders[i] = if differential {
                let (v, w) = embodiment::map_to_unicycle(d.command, &pose, &up);
                let (v, w, _) = embodiment::scale_wheels(v, w, &up);
                let (l, r) = embodiment::wheel_speeds(v, w, &up);
                self.max_wheel_speed = self.max_wheel_speed.max(l.abs()).max(r.abs());
                embodiment::step_unicycle(&pose, v, w, dt)
            } else {
                point_step(&pose, d.command, dt)
            };
        }
        for (a, v) in target_vel.iter().enumerate() {
            let noise = targets::noise_increment(&mut self.rngs[a], cfg.diffusion, dt);
            let t = &mut self.world.targets[a];
            let pose = Pose::new(t.position, t.heading);
            let next = if cfg.mode == Mode::Embodied {
                // Noise enters as a velocity perturbation of the robot.
                let u = *v + noise / dt;
                let (v, w) = embodiment::map_to_unicycle(u, &pose, &up);
                let (v, w, _) = embodiment::scale_wheels(v, w, &up);
                let (l, r) = embodiment::wheel_speeds(v, w, &up);
                self.max_wheel_speed = self.max_wheel_speed.max(l.abs()).max(r.abs());
                embodiment::step_unicycle(&pose, v, w, dt)
            } else {
                let moved = Pose::new(t.position + *v * dt + noise, t.heading);
                if moved.position != t.position {
                    Pose::new(moved.position, (moved.position - t.position).angle())
                } else {
                    moved
                }
            };
            t.position = next.position;
            t.heading = next.heading;
        }
        self.world.decisions = decisions;
        self.world.step += 1;

        // Penetration resolution.
        let mut clearance = f64::INFINITY;
        let fields = &self.fields;
        let mut penetrations = 0;
        let positions = self
            .world
            .herders
            .iter_mut()
            .map(|p| &mut p.position)
            .chain(self.world.targets.iter_mut().map(|t| &mut t.position));
        for q in positions {
            if !q.is_finite() {
                return Err(EngineError::PhysicsViolation {
                    time,
                    message: "non-finite agent position".into(),
                });
            }
            for f in fields {
                if f.obstacle.contains_strict(*q) {
                    let bp = f.obstacle.project(*q);
                    *q = bp.point + f.obstacle.edge_normal(bp.edge) * S_MIN;
                    penetrations += 1;
                }
            }
            for f in fields {
                if f.obstacle.contains_strict(*q) {
                    return Err(EngineError::PhysicsViolation {
                        time,
                        message: "agent could not be moved out of an obstacle".into(),
                    });
                }
                clearance = clearance.min(f.obstacle.distance_to_solid(*q));
            }
        }
        self.events.penetrations += penetrations;
        self.min_clearance = self.min_clearance.min(clearance);
        self.update_capture();
        Ok(())
    }

    fn baseline_decisions(&mut self, herder_pos: &[Vec2], target_pos: &[Vec2]) -> Vec<HerderDecision> {
        let cfg = &self.cfg;
        let planner = self.planner.as_mut().expect("baseline mode has a planner");
        let Some(com) = baseline::center_of_mass(target_pos) else {
            return herder_pos
                .iter()
                .map(|&h| {
                    let (command, saturated) = control::return_to_goal(h, &cfg.herder_params()).clamp_norm(cfg.v_h);
                    HerderDecision {
                        command,
                        saturated,
                        ..HerderDecision::default()
                    }
                })
                .collect();
        };
        if self.world.step >= planner.next_replan {
            planner.next_replan = self.world.step + planner.replan_steps;
            let grid = &planner.grid;
            let start = grid.nearest_free(grid.cell_of(com));
            let goal = grid.nearest_free(grid.cell_of(GOAL_CENTER));
            let path = match (start, goal) {
                (Some(s), Some(g)) => baseline::astar_cells(grid, s, g),
                _ => Err(PlanError::NoPath),
            };
            planner.path = match path {
                Ok(p) => p.cells.into_iter().map(|c| grid.center(c)).collect(),
                Err(PlanError::NoPath) => {
                    self.events.no_path += 1;
                    Vec::new()
                }
            };
        }
        let commands = baseline::arc_herding_step(
            herder_pos,
            target_pos,
            &planner.path,
            &planner.grid,
            &self.fields,
            &cfg.arc_params(),
            cfg.v_h,
        );
        commands
            .into_iter()
            .map(|command| HerderDecision {
                eta: true,
                command,
                saturated: command.norm() >= cfg.v_h,
                ..HerderDecision::default()
            })
            .collect()
    }

    /// Metric sample of the current state.
    pub fn sample(&self) -> MetricSample {
        let (hm, hs) = radius_stats(self.world.herders.iter().map(|p| p.position));
        let (tm, ts) = radius_stats(self.world.targets.iter().map(|t| t.position));
        MetricSample {
            t: self.world.time(),
            chi: self.chi,
            herder_mean: hm,
            herder_std: hs,
            target_mean: tm,
            target_std: ts,
        }
    }

    /// Trace rows for the current state.
    pub fn records(&self) -> Vec<TraceRecord> {
        let t = self.world.time();
        let embodied = self.cfg.mode == Mode::Embodied;
        let herders = self
            .world
            .herders
            .iter()
            .zip(&self.world.decisions)
            .enumerate()
            .map(|(id, (p, d))| TraceRecord {
                t,
                id,
                kind: AgentKind::Herder,
                x: p.position.x,
                y: p.position.y,
                heading: p.heading,
                eta: Some(d.eta as u8),
                mu: Some(d.mu as u8),
                sigma: Some(if embodied { d.sigma } else { 0.0 }),
                zeta: Some(if embodied { d.zeta } else { 0.0 }),
            });
        let targets = self.world.targets.iter().enumerate().map(|(id, s)| TraceRecord {
            t,
            id,
            kind: AgentKind::Target,
            x: s.position.x,
            y: s.position.y,
            heading: s.heading,
            eta: None,
            mu: None,
            sigma: None,
            zeta: None,
        });
        herders.chain(targets).collect()
    }

    fn finished(&self) -> bool {
        self.world.step >= self.cfg.steps() || self.holding()
    }

    /// Runs to the horizon or until full capture has been held.
    pub fn run(self, record_trace: bool) -> Result<(Trace, RunMetrics), EngineError> {
        self.run_with(record_trace, None)
    }

    pub fn run_with(
        mut self,
        record_trace: bool,
        hook: Option<TargetHook<'_>>,
    ) -> Result<(Trace, RunMetrics), EngineError> {
        let every = self.cfg.record_every;
        let mut trace = Trace::default();
        let mut samples = vec![self.sample()];
        if record_trace && self.cfg.steps() > 0 {
            trace.records.extend(self.records());
        }
        while !self.finished() {
            self.step_with(hook)?;
            if self.world.step.is_multiple_of(every) || self.finished() {
                samples.push(self.sample());
                if record_trace {
                    trace.records.extend(self.records());
                }
            }
        }
        let metrics = RunMetrics {
            samples,
            t_all_captured: self.t_all_captured,
            final_time: self.world.time(),
            final_chi: self.chi,
            held: self.holding(),
            events: self.events,
            max_wheel_speed: self.max_wheel_speed,
            min_clearance: self.min_clearance,
            steps: self.world.step,
        };
        Ok((trace, metrics))
    }
}

fn point_step(pose: &Pose, u: Vec2, dt: f64) -> Pose {
    let heading = u.normalized().map_or(pose.heading, |d| d.angle());
    Pose::new(pose.position + u * dt, heading)
}

/// Single run with trace.
pub fn run(cfg: &ScenarioConfig) -> Result<(Trace, RunMetrics), EngineError> {
    Simulation::new(cfg)?.run(true)
}

/// Outcome of one run inside a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub final_chi: f64,
    pub t_all_captured: Option<f64>,
    pub held: bool,
    pub final_time: f64,
    pub events: EventCounts,
    pub max_wheel_speed: f64,
    pub min_clearance: f64,
}

impl RunSummary {
    fn from_metrics(seed: u64, m: &RunMetrics) -> Self {
        Self {
            seed,
            final_chi: m.final_chi,
            t_all_captured: m.t_all_captured,
            held: m.held,
            final_time: m.final_time,
            events: m.events,
            max_wheel_speed: m.max_wheel_speed,
            min_clearance: m.min_clearance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub runs: Vec<RunSummary>,
    pub mean_chi: f64,
    pub std_chi: f64,
    /// Fraction of runs in which every target entered the goal.
    pub capture_rate: f64,
    pub capture_times: Vec<f64>,
}

impl BatchSummary {
    pub fn from_runs(runs: Vec<RunSummary>) -> Self {
        let n = runs.len() as f64;
        let mean_chi = runs.iter().map(|r| r.final_chi).sum::<f64>() / n;
        let var = runs.iter().map(|r| (r.final_chi - mean_chi).powi(2)).sum::<f64>() / n;
        let capture_times: Vec<f64> = runs.iter().filter_map(|r| r.t_all_captured).collect();
        Self {
            capture_rate: capture_times.len() as f64 / n,
            mean_chi,
            std_chi: var.sqrt(),
            capture_times,
            runs,
        }
    }

    pub fn median_capture_time(&self) -> Option<f64> {
        median(&self.capture_times)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Seed of the `k`-th run of a batch.
pub fn batch_seed(master: u64, k: u64) -> u64 {
    master.wrapping_add(k)
}

/// `n` independent runs on seeds `master, master+1, …` using `jobs`
/// threads. Results are collected in seed order, so the summary does not
/// depend on `jobs`.
pub fn run_batch(cfg: &ScenarioConfig, n: u64, jobs: usize) -> Result<BatchSummary, EngineError> {
    run_batch_with(cfg, n, jobs, None)
}

pub fn run_batch_with(
    cfg: &ScenarioConfig,
    n: u64,
    jobs: usize,
    hook: Option<TargetHook<'_>>,
) -> Result<BatchSummary, EngineError> {
    assert!(n >= 1, "a batch needs at least one run");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| EngineError::Validation(vec![format!("thread pool: {e}")]))?;
    let runs = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|k| {
                let mut c = cfg.clone();
                c.seed = batch_seed(cfg.seed, k);
                let (_, m) = Simulation::new(&c)?.run_with(false, hook)?;
                Ok(RunSummary::from_metrics(c.seed, &m))
            })
            .collect::<Result<Vec<_>, EngineError>>()
    })?;
    Ok(BatchSummary::from_runs(runs))
}
