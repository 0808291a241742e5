//! Scenario configuration: a flat `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! mode = ideal            # ideal | embodied | baseline; selects the defaults
//! n_targets = 25
//! beta_th = pi/4          # floats accept `pi`, `k*pi`, `pi/n`, `k*pi/n`
//! obstacle = 15, 15, 30, 10, 3*pi/4   # center x, center y, width, height, angle
//! herder = -20, 5                     # explicit start (optional heading)
//! target = 25, 25, 0.5
//! ```
//!
//! Unknown keys are rejected. Keys not given take the defaults of the
//! selected mode. `obstacle`, `herder` and `target` may repeat; explicit
//! agents fill the first slots and the rest are sampled at run time.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::baseline::ArcHerdingParams;
use crate::control::{HerderParams, OrbitParams};
use crate::embodiment::UnicycleParams;
use crate::error::{ConfigError, GeometryError};
use crate::geometry::{ConvexPolygon, Vec2};
use crate::potential::{ObstacleField, PairRepulsion};
use crate::targets::TargetParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Point herders and Brownian point targets.
    Ideal,
    /// Differential-drive herders and targets with orbiting control.
    Embodied,
    /// Cohesive arc-herding comparator on the ideal target model.
    Baseline,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(Mode::Ideal),
            "embodied" => Ok(Mode::Embodied),
            "baseline" => Ok(Mode::Baseline),
            other => Err(format!("unknown mode `{other}` (expected ideal, embodied or baseline)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ideal => "ideal",
            Mode::Embodied => "embodied",
            Mode::Baseline => "baseline",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleSpec {
    pub center: Vec2,
    pub width: f64,
    pub height: f64,
    pub angle: f64,
}

impl ObstacleSpec {
    pub fn polygon(&self) -> Result<ConvexPolygon, GeometryError> {
        ConvexPolygon::rectangle(self.center, self.width, self.height, self.angle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSpec {
    pub position: Vec2,
    pub heading: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub seed: u64,
    pub n_herders: u64,
    pub n_targets: u64,
    /// Rectangles drawn by the generator in addition to explicit ones.
    pub random_obstacles: u64,
    pub rho_0: f64,
    pub rho_g: f64,

    pub v_h: f64,
    pub alpha: f64,
    pub delta: f64,
    pub gamma: f64,
    pub epsilon_o: f64,

    pub lambda: f64,
    pub beta: f64,
    pub diffusion: f64,
    pub lambda_o: f64,
    pub k_o: f64,

    pub alpha_o: f64,
    pub alpha_r: f64,
    pub r_th: f64,
    pub epsilon_h: f64,
    pub beta_th: f64,
    pub beta_orb: f64,
    pub k_d: f64,
    pub d_th: f64,

    pub unicycle_d: f64,
    pub wheelbase: f64,
    pub wheel_v_max: f64,
    pub wheel_epsilon: f64,

    pub arc_radius: f64,
    pub arc_span: f64,
    pub com_gain: f64,
    pub grid_resolution: f64,
    pub inflation: f64,
    pub replan_interval: f64,

    pub obstacle_width_min: f64,
    pub obstacle_width_max: f64,
    pub obstacle_height_min: f64,
    pub obstacle_height_max: f64,

    pub dt: f64,
    pub t_max: f64,
    /// Seconds χ must stay at 1 before a run stops early.
    pub hold: f64,
    /// Trace decimation in steps.
    pub record_every: u64,

    pub obstacles: Vec<ObstacleSpec>,
    pub herders: Vec<AgentSpec>,
    pub targets: Vec<AgentSpec>,
}

impl ScenarioConfig {
    pub fn defaults(mode: Mode) -> Self {
        let ideal = ScenarioConfig {
            mode,
            seed: 0,
            n_herders: 10,
            n_targets: 100,
            random_obstacles: 7,
            rho_0: 50.0,
            rho_g: 10.0,
            v_h: 7.5,
            alpha: 5.0,
            delta: 1.25,
            gamma: 0.3,
            epsilon_o: 1.0,
            lambda: 2.5,
            beta: 3.0,
            diffusion: 0.5,
            lambda_o: 2.5,
            k_o: 10.0,
            alpha_o: 4.5,
            alpha_r: 3.0,
            r_th: 0.375,
            epsilon_h: 0.1,
            beta_th: PI / 4.0,
            beta_orb: PI / 18.0,
            k_d: 1.0,
            d_th: 0.45,
            unicycle_d: 0.5,
            wheelbase: 0.5,
            wheel_v_max: 7.5,
            wheel_epsilon: 1e-9,
            arc_radius: 2.5,
            arc_span: PI / 2.0,
            com_gain: 2.0,
            grid_resolution: 1.0,
            inflation: 2.5,
            replan_interval: 1.0,
            obstacle_width_min: 8.0,
            obstacle_width_max: 20.0,
            obstacle_height_min: 2.0,
            obstacle_height_max: 20.0,
            dt: 0.01,
            t_max: 600.0,
            hold: 5.0,
            record_every: 10,
            obstacles: Vec::new(),
            herders: Vec::new(),
            targets: Vec::new(),
        };
        match mode {
            Mode::Ideal | Mode::Baseline => ideal,
            Mode::Embodied => ScenarioConfig {
                n_herders: 2,
                n_targets: 3,
                random_obstacles: 0,
                rho_0: 1.0,
                rho_g: 0.35,
                v_h: 0.3,
                alpha: 3.0,
                delta: 0.375,
                gamma: 0.3,
                epsilon_o: 0.1,
                lambda: 0.5,
                beta: 3.0,
                diffusion: 0.0,
                lambda_o: 0.2,
                k_o: 10.0,
                unicycle_d: 0.1,
                wheelbase: 0.233,
                wheel_v_max: 0.31,
                arc_radius: 0.5,
                grid_resolution: 0.05,
                inflation: 0.2,
                obstacle_width_min: 0.2,
                obstacle_width_max: 0.7,
                obstacle_height_min: 0.1,
                obstacle_height_max: 0.25,
                dt: 0.002,
                t_max: 300.0,
                record_every: 50,
                ..ideal
            },
        }
    }

    pub fn herder_params(&self) -> HerderParams {
        HerderParams {
            v_h: self.v_h,
            alpha: self.alpha,
            delta: self.delta,
            gamma: self.gamma,
            rho_g: self.rho_g,
            epsilon_o: self.epsilon_o,
        }
    }

    pub fn target_params(&self) -> TargetParams {
        TargetParams {
            lambda: self.lambda,
            beta: self.beta,
            diffusion: self.diffusion,
            lambda_o: self.lambda_o,
            k_o: self.k_o,
        }
    }

    pub fn orbit_params(&self) -> OrbitParams {
        OrbitParams {
            alpha_o: self.alpha_o,
            alpha_r: self.alpha_r,
            r_th: self.r_th,
            epsilon_h: self.epsilon_h,
            beta_orb: self.beta_orb,
            beta_th: self.beta_th,
        }
    }

    pub fn repulsion(&self) -> PairRepulsion {
        PairRepulsion {
            k_d: self.k_d,
            d_th: self.d_th,
        }
    }

    pub fn unicycle_params(&self) -> UnicycleParams {
        UnicycleParams {
            d: self.unicycle_d,
            l: self.wheelbase,
            v_max: self.wheel_v_max,
            epsilon: self.wheel_epsilon,
        }
    }

    pub fn arc_params(&self) -> ArcHerdingParams {
        ArcHerdingParams {
            arc_radius: self.arc_radius,
            arc_span: self.arc_span,
            com_gain: self.com_gain,
            grid_resolution: self.grid_resolution,
            inflation: self.inflation,
            replan_interval: self.replan_interval,
        }
    }

    /// Fields of the explicit obstacles. Generated obstacles are added by
    /// the engine.
    pub fn obstacle_fields(&self) -> Result<Vec<ObstacleField>, GeometryError> {
        self.obstacles
            .iter()
            .map(|o| Ok(ObstacleField::new(o.polygon()?, self.lambda_o, self.k_o)))
            .collect()
    }

    /// Minimum boundary-to-boundary separation required between obstacles.
    pub fn obstacle_clearance(&self) -> f64 {
        let base = self.lambda_o + self.epsilon_o;
        match self.mode {
            Mode::Embodied => base + self.d_th,
            _ => base,
        }
    }

    pub fn steps(&self) -> u64 {
        (self.t_max / self.dt).round() as u64
    }

    pub fn hold_steps(&self) -> u64 {
        (self.hold / self.dt).round() as u64
    }

    /// Parses configuration text. `mode` overrides any `mode` line; the
    /// overrides are `key=value` strings applied after the file.
    pub fn from_text(text: &str, mode: Option<Mode>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut lines: Vec<(Origin, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            lines.push((Origin::Line(i + 1), k.trim(), v.trim()));
        }
        for o in overrides {
            let (k, v) = o.split_once('=').ok_or_else(|| ConfigError::Override {
                text: o.clone(),
                message: "expected key=value".into(),
            })?;
            lines.push((Origin::Override(o), k.trim(), v.trim()));
        }

        let mut selected = Mode::Ideal;
        for (origin, k, v) in &lines {
            if *k == "mode" {
                selected = v.parse().map_err(|m| origin.error(m))?;
            }
        }
        let mut cfg = ScenarioConfig::defaults(mode.unwrap_or(selected));
        for (origin, k, v) in &lines {
            if *k != "mode" {
                cfg.set(k, v).map_err(|m| origin.error(m))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "obstacle" => {
                let v = parse_list(value, 5, 5)?;
                self.obstacles.push(ObstacleSpec {
                    center: Vec2::new(v[0], v[1]),
                    width: v[2],
                    height: v[3],
                    angle: v[4],
                });
                return Ok(());
            }
            "herder" | "target" => {
                let v = parse_list(value, 2, 3)?;
                let spec = AgentSpec {
                    position: Vec2::new(v[0], v[1]),
                    heading: v.get(2).copied(),
                };
                if key == "herder" {
                    self.herders.push(spec);
                } else {
                    self.targets.push(spec);
                }
                return Ok(());
            }
            _ => {}
        }
        let spec = KEYS
            .iter()
            .find(|k| k.name == key)
            .ok_or_else(|| format!("unknown key `{key}`"))?;
        let parsed = match spec.bound {
            Bound::Count | Bound::AtLeastOne => Value::Int(
                value
                    .parse::<u64>()
                    .map_err(|_| format!("`{key}` expects a non-negative integer, got `{value}`"))?,
            ),
            _ => Value::Float(parse_float(value).map_err(|m| format!("`{key}`: {m}"))?),
        };
        (spec.set)(self, parsed);
        Ok(())
    }

    /// Bound and cross-parameter checks. Scene geometry is checked by the
    /// engine.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        for k in KEYS {
            let v = (k.get)(self);
            if !k.bound.admits(v) {
                errors.push(format!("{} = {} violates bound {}", k.name, v, k.bound));
            }
        }
        if self.delta >= self.lambda {
            errors.push(format!("delta = {} must be below lambda = {}", self.delta, self.lambda));
        }
        if self.mode == Mode::Embodied && self.beta_orb >= self.beta_th {
            errors.push(format!(
                "beta_orb = {} must be below beta_th = {}",
                self.beta_orb, self.beta_th
            ));
        }
        if self.obstacle_width_min > self.obstacle_width_max {
            errors.push("obstacle_width_min exceeds obstacle_width_max".into());
        }
        if self.obstacle_height_min > self.obstacle_height_max {
            errors.push("obstacle_height_min exceeds obstacle_height_max".into());
        }
        if self.herders.len() as u64 > self.n_herders {
            errors.push(format!(
                "{} herder lines but n_herders = {}",
                self.herders.len(),
                self.n_herders
            ));
        }
        if self.targets.len() as u64 > self.n_targets {
            errors.push(format!(
                "{} target lines but n_targets = {}",
                self.targets.len(),
                self.n_targets
            ));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !(o.width > 0.0 && o.height > 0.0) || !o.center.is_finite() || !o.angle.is_finite() {
                errors.push(format!("obstacle {i} has invalid geometry"));
            }
        }
        for (kind, list) in [("herder", &self.herders), ("target", &self.targets)] {
            for (i, a) in list.iter().enumerate() {
                if !a.position.is_finite() || a.heading.is_some_and(|h| !h.is_finite()) {
                    errors.push(format!("{kind} {i} has a non-finite pose"));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation(errors))
        }
    }

    /// Serializes every key, so the output reloads to an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# lengths in m, angles in rad, times in s\n");
        out.push_str(&format!("mode = {}\n", self.mode));
        for k in KEYS {
            out.push_str(&format!("{} = {}\n", k.name, (k.get)(self)));
        }
        for o in &self.obstacles {
            out.push_str(&format!(
                "obstacle = {}, {}, {}, {}, {}\n",
                o.center.x, o.center.y, o.width, o.height, o.angle
            ));
        }
        for (kind, list) in [("herder", &self.herders), ("target", &self.targets)] {
            for a in list {
                match a.heading {
                    Some(h) => out.push_str(&format!("{kind} = {}, {}, {}\n", a.position.x, a.position.y, h)),
                    None => out.push_str(&format!("{kind} = {}, {}\n", a.position.x, a.position.y)),
                }
            }
        }
        out
    }
}

enum Origin<'a> {
    Line(usize),
    Override(&'a str),
}

impl Origin<'_> {
    fn error(&self, message: String) -> ConfigError {
        match self {
            Origin::Line(line) => ConfigError::Parse { line: *line, message },
            Origin::Override(text) => ConfigError::Override {
                text: text.to_string(),
                message,
            },
        }
    }
}

pub fn load_config(path: &Path, mode: Option<Mode>, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioConfig::from_text(&text, mode, overrides)
}

/// Float with optional `pi` forms: `pi`, `-pi/2`, `3*pi/4`, `2pi`.
pub fn parse_float(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{s}` is not finite"))
        };
    }
    let bad = || format!("cannot parse `{s}` as a number");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let (sign, num) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, num),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => k.trim_end_matches('*').trim().parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    let v = sign * factor * PI / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_list(s: &str, min: usize, max: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s.split(',').map(parse_float).collect::<Result<_, _>>()?;
    if v.len() < min || v.len() > max {
        return Err(if min == max {
            format!("expected {min} comma-separated values, got {}", v.len())
        } else {
            format!("expected {min} to {max} comma-separated values, got {}", v.len())
        });
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
}

impl Value {
    pub fn as_f64(self) -> f64 {
        match self {
            Value::Float(v) => v,
            Value::Int(v) => v as f64,
        }
    }

    fn int(self) -> u64 {
        match self {
            Value::Int(v) => v,
            Value::Float(v) => v as u64,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{}` on f64 prints the shortest string that parses back exactly.
            Value::Float(v) => write!(f, "{v}"),
            Value::Int(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Positive,
    NonNegative,
    Unit,
    /// `(0, 2π)`.
    Arc,
    Count,
    AtLeastOne,
}

impl Bound {
    pub fn admits(&self, v: Value) -> bool {
        match (self, v) {
            (Bound::Positive, Value::Float(x)) => x > 0.0,
            (Bound::NonNegative, Value::Float(x)) => x >= 0.0,
            (Bound::Unit, Value::Float(x)) => (0.0..=1.0).contains(&x),
            (Bound::Arc, Value::Float(x)) => x > 0.0 && x < TAU,
            (Bound::Count, Value::Int(_)) => true,
            (Bound::AtLeastOne, Value::Int(n)) => n >= 1,
            _ => false,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::Positive => "> 0",
            Bound::NonNegative => ">= 0",
            Bound::Unit => "in [0, 1]",
            Bound::Arc => "in (0, 2pi)",
            Bound::Count => "integer >= 0",
            Bound::AtLeastOne => "integer >= 1",
        })
    }
}

pub struct KeySpec {
    pub name: &'static str,
    pub bound: Bound,
    pub help: &'static str,
    get: fn(&ScenarioConfig) -> Value,
    set: fn(&mut ScenarioConfig, Value),
}

impl KeySpec {
    pub fn value(&self, cfg: &ScenarioConfig) -> Value {
        (self.get)(cfg)
    }
}

macro_rules! float_key {
    ($field:ident, $bound:expr, $help:literal) => {
        KeySpec {
            name: stringify!($field),
            bound: $bound,
            help: $help,
            get: |c| Value::Float(c.$field),
            set: |c, v| c.$field = v.as_f64(),
        }
    };
}

macro_rules! int_key {
    ($field:ident, $bound:expr, $help:literal) => {
        KeySpec {
            name: stringify!($field),
            bound: $bound,
            help: $help,
            get: |c| Value::Int(c.$field),
            set: |c, v| c.$field = v.int(),
        }
    };
}

/// Every scalar key with its bound and meaning.
pub static KEYS: &[KeySpec] = &[
    int_key!(seed, Bound::Count, "master RNG seed"),
    int_key!(n_herders, Bound::Count, "number of herders"),
    int_key!(n_targets, Bound::Count, "number of targets"),
    int_key!(random_obstacles, Bound::Count, "rectangles drawn by the generator"),
    float_key!(rho_0, Bound::Positive, "radius of the initial placement disc [m]"),
    float_key!(rho_g, Bound::Positive, "goal radius [m]"),
    float_key!(v_h, Bound::Positive, "herder speed limit [m/s]"),
    float_key!(alpha, Bound::Positive, "attraction to the steering point"),
    float_key!(delta, Bound::Positive, "steering point offset behind the target [m]"),
    float_key!(gamma, Bound::Unit, "normal share of the herder obstacle force"),
    float_key!(epsilon_o, Bound::Positive, "obstacle safety margin [m]"),
    float_key!(lambda, Bound::Positive, "target sensing radius for herders [m]"),
    float_key!(beta, Bound::Positive, "target repulsion strength from herders"),
    float_key!(diffusion, Bound::NonNegative, "target noise diffusion [m^2/s]"),
    float_key!(lambda_o, Bound::Positive, "obstacle influence radius [m]"),
    float_key!(k_o, Bound::Positive, "obstacle repulsion strength"),
    float_key!(alpha_o, Bound::NonNegative, "orbiting tangential gain"),
    float_key!(alpha_r, Bound::NonNegative, "orbiting radial gain"),
    float_key!(r_th, Bound::Positive, "orbiting threshold distance [m]"),
    float_key!(epsilon_h, Bound::Positive, "orbiting blend width [m]"),
    float_key!(beta_th, Bound::Positive, "orbiting activation angle [rad]"),
    float_key!(beta_orb, Bound::NonNegative, "orbiting deadband angle [rad]"),
    float_key!(k_d, Bound::Positive, "same-type repulsion strength"),
    float_key!(d_th, Bound::Positive, "same-type repulsion cutoff [m]"),
    float_key!(
        unicycle_d,
        Bound::Positive,
        "look-ahead distance of the unicycle mapping [m]"
    ),
    float_key!(wheelbase, Bound::Positive, "wheelbase [m]"),
    float_key!(wheel_v_max, Bound::Positive, "per-wheel speed limit [m/s]"),
    float_key!(wheel_epsilon, Bound::Positive, "division guard in wheel scaling"),
    float_key!(arc_radius, Bound::Positive, "baseline arc radius [m]"),
    float_key!(arc_span, Bound::Arc, "baseline arc span [rad]"),
    float_key!(com_gain, Bound::Positive, "baseline gain toward the arc slot"),
    float_key!(grid_resolution, Bound::Positive, "baseline planning grid cell size [m]"),
    float_key!(inflation, Bound::NonNegative, "baseline obstacle inflation [m]"),
    float_key!(replan_interval, Bound::Positive, "baseline replanning period [s]"),
    float_key!(
        obstacle_width_min,
        Bound::Positive,
        "generator: minimum rectangle width [m]"
    ),
    float_key!(
        obstacle_width_max,
        Bound::Positive,
        "generator: maximum rectangle width [m]"
    ),
    float_key!(
        obstacle_height_min,
        Bound::Positive,
        "generator: minimum rectangle height [m]"
    ),
    float_key!(
        obstacle_height_max,
        Bound::Positive,
        "generator: maximum rectangle height [m]"
    ),
    float_key!(dt, Bound::Positive, "sampling time [s]"),
    float_key!(t_max, Bound::NonNegative, "simulated horizon [s]"),
    float_key!(
        hold,
        Bound::NonNegative,
        "time full capture must persist before stopping [s]"
    ),
    int_key!(record_every, Bound::AtLeastOne, "trace decimation [steps]"),
];

/// Help text listing every key with its default in `mode` and its bound.
pub fn key_reference(mode: Mode) -> String {
    let d = ScenarioConfig::defaults(mode);
    let mut out = format!("configuration keys (defaults for mode = {mode}):\n");
    out.push_str("  mode                 ideal | embodied | baseline\n");
    for k in KEYS {
        out.push_str(&format!(
            "  {:<20} {:<22} {:<14} {}\n",
            k.name,
            k.value(&d).to_string(),
            k.bound.to_string(),
            k.help
        ));
    }
    out.push_str("  obstacle = cx, cy, width, height, angle   (repeatable)\n");
    out.push_str("  herder = x, y[, heading]                  (repeatable)\n");
    out.push_str("  target = x, y[, heading]                  (repeatable)\n");
    out
}
