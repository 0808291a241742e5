//! Checks shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shepherd::baseline::{astar_cells, Cell, OccupancyGrid};
use shepherd::control::{compose_embodied, compose_ideal, select_targets, Snapshot};
use shepherd::engine::Simulation;
use shepherd::geometry::ConvexPolygon;
use shepherd::potential::{ObstacleField, PairRepulsion};
use shepherd::scenario::{load_config, Mode, ScenarioConfig};
use shepherd::trace::Trace;
use shepherd::Vec2;

pub fn scenario(name: &str) -> ScenarioConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    load_config(&path, None, &[]).unwrap()
}

pub fn random_rectangle(rng: &mut ChaCha8Rng, spread: f64, size: (f64, f64)) -> ConvexPolygon {
    let c = Vec2::new(rng.random_range(-spread..spread), rng.random_range(-spread..spread));
    let w = rng.random_range(size.0..size.1);
    let h = rng.random_range(size.0..size.1);
    ConvexPolygon::rectangle(c, w, h, rng.random_range(0.0..std::f64::consts::PI)).unwrap()
}

fn rel_error(analytic: Vec2, fd: Vec2) -> f64 {
    (analytic - fd).norm() / analytic.norm()
}

fn central_difference(f: impl Fn(Vec2) -> f64, q: Vec2, h: f64) -> Vec2 {
    let dx = (f(q + Vec2::new(h, 0.0)) - f(q - Vec2::new(h, 0.0))) / (2.0 * h);
    let dy = (f(q + Vec2::new(0.0, h)) - f(q - Vec2::new(0.0, h))) / (2.0 * h);
    Vec2::new(dx, dy)
}

/// Largest relative error between the analytic obstacle force and the
/// negated finite-difference gradient of the potential, over `n` probes at
/// distances in `[0.05, 0.95]·λ_o` from random rectangles.
pub fn obstacle_gradient_error(n: usize, seed: u64, lambda_o: f64, k_o: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < n {
        let scale = lambda_o * 4.0;
        let field = ObstacleField::new(random_rectangle(&mut rng, scale, (0.2 * scale, scale)), lambda_o, k_o);
        let q = field.centroid() + Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)) * scale;
        let d = field.obstacle.distance_to_solid(q);
        if !(0.05 * lambda_o..=0.95 * lambda_o).contains(&d) {
            continue;
        }
        let h = 1e-5 * d;
        let fd = -central_difference(|p| field.potential(p).unwrap(), q, h);
        worst = worst.max(rel_error(field.force(q).unwrap(), fd));
        done += 1;
    }
    worst
}

/// Same check for the pair repulsion at separations in `[0.05, 0.95]·d_th`.
pub fn pair_gradient_error(n: usize, seed: u64, rep: PairRepulsion) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let qj = Vec2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let r = rng.random_range(0.05..0.95) * rep.d_th;
        let qi = qj + Vec2::from_angle(rng.random_range(0.0..std::f64::consts::TAU)) * r;
        let fd = -central_difference(|p| rep.potential(p, qj), qi, 1e-5 * r);
        worst = worst.max(rel_error(rep.force(qi, qj).unwrap(), fd));
    }
    worst
}

pub fn random_grid(rng: &mut ChaCha8Rng, n: usize, density: f64) -> OccupancyGrid {
    OccupancyGrid::from_cells(n, n, (0..n * n).map(|_| rng.random_bool(density)).collect())
}

/// Plain Dijkstra with a binary heap; costs compared as `(value, straight,
/// diagonal)` so equal-valued paths resolve identically.
pub fn dijkstra(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Option<(u32, u32)> {
    if grid.is_occupied(start) || grid.is_occupied(goal) {
        return None;
    }
    let key = |s: u32, d: u32| s as f64 + d as f64 * std::f64::consts::SQRT_2;
    let mut best = vec![None::<(u32, u32)>; grid.width * grid.height];
    let idx = |c: Cell| c.1 * grid.width + c.0;
    let mut heap = BinaryHeap::new();
    best[idx(start)] = Some((0, 0));
    heap.push(Reverse((OrdF64(0.0), 0u32, 0u32, start)));
    while let Some(Reverse((OrdF64(k), s, d, c))) = heap.pop() {
        if best[idx(c)].is_some_and(|(bs, bd)| key(bs, bd) < k) {
            continue;
        }
        if c == goal {
            return Some((s, d));
        }
        for (n, diag) in grid.moves(c) {
            let (ns, nd) = if diag { (s, d + 1) } else { (s + 1, d) };
            let nk = key(ns, nd);
            if best[idx(n)].is_none_or(|(bs, bd)| nk < key(bs, bd)) {
                best[idx(n)] = Some((ns, nd));
                heap.push(Reverse((OrdF64(nk), ns, nd, n)));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Number of grids on which A* and Dijkstra disagree about the optimal cost
/// (or about reachability), and how many of the grids had a path.
pub fn astar_dijkstra_mismatches(grids: usize, n: usize, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    let mut reachable = 0;
    for _ in 0..grids {
        let mut g = random_grid(&mut rng, n, 0.3);
        let s = (rng.random_range(0..n), rng.random_range(0..n));
        let t = (rng.random_range(0..n), rng.random_range(0..n));
        g.set(s, false);
        g.set(t, false);
        let a = astar_cells(&g, s, t).ok().map(|p| (p.cost.straight, p.cost.diagonal));
        let b = dijkstra(&g, s, t);
        reachable += b.is_some() as usize;
        mismatches += (a != b) as usize;
    }
    (mismatches, reachable)
}

fn mirror_scene(rng: &mut ChaCha8Rng, cfg: &ScenarioConfig) -> (Vec<Vec2>, Vec<Vec2>, Vec<ObstacleField>) {
    let r = cfg.rho_0;
    let fields: Vec<ObstacleField> = (0..2)
        .map(|_| ObstacleField::new(random_rectangle(rng, r, (0.1 * r, 0.3 * r)), cfg.lambda_o, cfg.k_o))
        .collect();
    let mut draw = |count: usize| -> Vec<Vec2> {
        let mut out = Vec::new();
        while out.len() < count {
            let q = Vec2::new(rng.random_range(-r..r), rng.random_range(-r..r));
            if fields.iter().all(|f| f.obstacle.distance_to_solid(q) > 0.01 * r) {
                out.push(q);
            }
        }
        out
    };
    let herders = draw(3);
    let targets = draw(6);
    (herders, targets, fields)
}

/// Largest deviation between the command computed in a mirrored scene and
/// the mirror of the original command, over `n` random scenes.
pub fn mirror_error(n: usize, seed: u64, mode: Mode) -> f64 {
    let cfg = ScenarioConfig::defaults(mode);
    let p = cfg.herder_params();
    let (op, rep) = (cfg.orbit_params(), cfg.repulsion());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let (hs, ts, fs) = mirror_scene(&mut rng, &cfg);
        let mhs: Vec<Vec2> = hs.iter().map(|v| v.mirror_x()).collect();
        let mts: Vec<Vec2> = ts.iter().map(|v| v.mirror_x()).collect();
        let mfs: Vec<ObstacleField> = fs.iter().map(|f| f.mirror_x()).collect();
        let a = Snapshot {
            herders: &hs,
            targets: &ts,
            fields: &fs,
        };
        let b = Snapshot {
            herders: &mhs,
            targets: &mts,
            fields: &mfs,
        };
        let sel = select_targets(&hs, &ts, cfg.rho_g);
        assert_eq!(sel, select_targets(&mhs, &mts, cfg.rho_g));
        for i in 0..hs.len() {
            let (u, v) = match mode {
                Mode::Embodied => (
                    compose_embodied(i, &a, sel[i], &p, cfg.lambda_o, &op, &rep)
                        .unwrap()
                        .command,
                    compose_embodied(i, &b, sel[i], &p, cfg.lambda_o, &op, &rep)
                        .unwrap()
                        .command,
                ),
                _ => (
                    compose_ideal(i, &a, sel[i], &p, cfg.lambda_o).unwrap().command,
                    compose_ideal(i, &b, sel[i], &p, cfg.lambda_o).unwrap().command,
                ),
            };
            worst = worst.max((u.mirror_x() - v).norm());
        }
    }
    worst
}

pub fn trace_of(cfg: &ScenarioConfig) -> Trace {
    Simulation::new(cfg).unwrap().run(true).unwrap().0
}

/// Traces of `seeds` computed one after another and on `threads` threads.
pub fn traces_serial_and_threaded(cfg: &ScenarioConfig, seeds: &[u64], threads: usize) -> (Vec<Trace>, Vec<Trace>) {
    let with_seed = |s: u64| {
        let mut c = cfg.clone();
        c.seed = s;
        trace_of(&c)
    };
    let serial: Vec<Trace> = seeds.iter().map(|&s| with_seed(s)).collect();
    let threaded: Vec<Trace> = std::thread::scope(|scope| {
        let chunks: Vec<_> = seeds
            .chunks(seeds.len().div_ceil(threads))
            .map(|chunk| scope.spawn(move || chunk.iter().map(|&s| with_seed(s)).collect::<Vec<_>>()))
            .collect();
        chunks.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    (serial, threaded)
}
