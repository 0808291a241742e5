//! Cohesive-herding comparator.
//!
//! Herders hold evenly spaced slots on an arc behind the targets' center
//! of mass and push the group along an A* path to the goal. This treats
//! the targets as one cohesive body, which is exactly what non-cohesive
//! targets defeat.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use crate::error::PlanError;
use crate::geometry::{signed_angle, ConvexPolygon, Rotation, Vec2};
use crate::potential::ObstacleField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcHerdingParams {
    pub arc_radius: f64,
    pub arc_span: f64,
    /// Proportional gain pulling a herder onto its slot.
    pub com_gain: f64,
    pub grid_resolution: f64,
    /// Obstacle inflation used when rasterizing.
    pub inflation: f64,
    /// Seconds between A* replans.
    pub replan_interval: f64,
}

/// Cell index `(column, row)`.
pub type Cell = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    /// Lower-left corner of cell `(0, 0)`.
    pub origin: Vec2,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
    occupied: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(origin: Vec2, resolution: f64, width: usize, height: usize) -> Self {
        Self {
            origin,
            resolution,
            width,
            height,
            occupied: vec![false; width * height],
        }
    }

    pub fn from_cells(width: usize, height: usize, occupied: Vec<bool>) -> Self {
        assert_eq!(occupied.len(), width * height);
        Self {
            origin: Vec2::ZERO,
            resolution: 1.0,
            width,
            height,
            occupied,
        }
    }

    #[inline]
    pub fn is_occupied(&self, c: Cell) -> bool {
        self.occupied[c.1 * self.width + c.0]
    }

    pub fn set(&mut self, c: Cell, occupied: bool) {
        self.occupied[c.1 * self.width + c.0] = occupied;
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn center(&self, c: Cell) -> Vec2 {
        self.origin
            + Vec2::new(
                (c.0 as f64 + 0.5) * self.resolution,
                (c.1 as f64 + 0.5) * self.resolution,
            )
    }

    /// Cell containing `p`, clamped onto the grid.
    pub fn cell_of(&self, p: Vec2) -> Cell {
        let rel = (p - self.origin) / self.resolution;
        let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        (clamp(rel.x, self.width), clamp(rel.y, self.height))
    }

    /// Nearest free cell to `c` by breadth-first search.
    pub fn nearest_free(&self, c: Cell) -> Option<Cell> {
        if !self.is_occupied(c) {
            return Some(c);
        }
        let mut seen = vec![false; self.width * self.height];
        let mut queue = std::collections::VecDeque::from([c]);
        seen[c.1 * self.width + c.0] = true;
        let mut best: Option<(Cell, f64)> = None;
        let target = self.center(c);
        while let Some(cur) = queue.pop_front() {
            if !self.is_occupied(cur) {
                let d = self.center(cur).distance(target);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((cur, d));
                }
                continue;
            }
            if best.is_some() {
                continue;
            }
            for n in self.neighbors4(cur) {
                let k = n.1 * self.width + n.0;
                if !seen[k] {
                    seen[k] = true;
                    queue.push_back(n);
                }
            }
        }
        best.map(|(c, _)| c)
    }

    fn neighbors4(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        let (x, y) = (c.0 as isize, c.1 as isize);
        [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .into_iter()
            .map(move |(dx, dy)| (x + dx, y + dy))
            .filter(|&(nx, ny)| nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height)
            .map(|(nx, ny)| (nx as usize, ny as usize))
    }

    /// 8-connected moves out of `c`. Diagonals may not cut an occupied corner.
    pub fn moves(&self, c: Cell) -> Vec<(Cell, bool)> {
        let mut out = Vec::with_capacity(8);
        let (x, y) = (c.0 as isize, c.1 as isize);
        let free = |nx: isize, ny: isize| {
            nx >= 0
                && ny >= 0
                && (nx as usize) < self.width
                && (ny as usize) < self.height
                && !self.is_occupied((nx as usize, ny as usize))
        };
        for dy in -1..=1 {
            for dx in -1..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x + dx, y + dy);
                if !free(nx, ny) {
                    continue;
                }
                let diagonal = dx != 0 && dy != 0;
                if diagonal && !(free(x + dx, y) && free(x, y + dy)) {
                    continue;
                }
                out.push(((nx as usize, ny as usize), diagonal));
            }
        }
        out
    }
}

/// Occupancy of a square domain: a cell is occupied iff its center lies
/// within `inflation` of some obstacle.
pub fn rasterize(obstacles: &[ConvexPolygon], bounds: (Vec2, Vec2), resolution: f64, inflation: f64) -> OccupancyGrid {
    let (lo, hi) = bounds;
    let width = ((hi.x - lo.x) / resolution).ceil().max(1.0) as usize;
    let height = ((hi.y - lo.y) / resolution).ceil().max(1.0) as usize;
    let mut grid = OccupancyGrid::new(lo, resolution, width, height);
    for poly in obstacles {
        let (plo, phi) = poly.bounds();
        let pad = Vec2::new(inflation + resolution, inflation + resolution);
        let c0 = grid.cell_of(plo - pad);
        let c1 = grid.cell_of(phi + pad);
        for y in c0.1..=c1.1 {
            for x in c0.0..=c1.0 {
                if poly.distance_to_solid(grid.center((x, y))) <= inflation {
                    grid.set((x, y), true);
                }
            }
        }
    }
    grid
}

/// Octile path length stored as move counts so that equal paths compare
/// bit-exactly regardless of summation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct OctileCost {
    pub straight: u32,
    pub diagonal: u32,
}

impl OctileCost {
    pub fn value(&self) -> f64 {
        self.straight as f64 + self.diagonal as f64 * SQRT_2
    }

    pub fn step(self, diagonal: bool) -> Self {
        if diagonal {
            Self {
                diagonal: self.diagonal + 1,
                ..self
            }
        } else {
            Self {
                straight: self.straight + 1,
                ..self
            }
        }
    }
}

/// Admissible, consistent octile heuristic in cell units.
pub fn octile_distance(a: Cell, b: Cell) -> f64 {
    let dx = a.0.abs_diff(b.0) as f64;
    let dy = a.1.abs_diff(b.1) as f64;
    dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<Cell>,
    pub cost: OctileCost,
}

impl GridPath {
    /// Path length in meters.
    pub fn length(&self, resolution: f64) -> f64 {
        self.cost.value() * resolution
    }
}

struct Open {
    f: f64,
    g: OctileCost,
    cell: Cell,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on f, then on cell for determinism.
        other.f.total_cmp(&self.f).then_with(|| other.cell.cmp(&self.cell))
    }
}

/// A* over free cells, 8-connected, octile metric.
pub fn astar_cells(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Result<GridPath, PlanError> {
    if grid.is_occupied(start) || grid.is_occupied(goal) {
        return Err(PlanError::NoPath);
    }
    let idx = |c: Cell| c.1 * grid.width + c.0;
    let n = grid.width * grid.height;
    let mut best: Vec<Option<OctileCost>> = vec![None; n];
    let mut parent: Vec<usize> = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    best[idx(start)] = Some(OctileCost::default());
    open.push(Open {
        f: octile_distance(start, goal),
        g: OctileCost::default(),
        cell: start,
    });
    while let Some(Open { g, cell, .. }) = open.pop() {
        let k = idx(cell);
        if closed[k] {
            continue;
        }
        closed[k] = true;
        if cell == goal {
            let mut cells = vec![cell];
            let mut cur = k;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                cells.push((cur % grid.width, cur / grid.width));
            }
            cells.reverse();
            return Ok(GridPath { cells, cost: g });
        }
        for (next, diagonal) in grid.moves(cell) {
            let nk = idx(next);
            if closed[nk] {
                continue;
            }
            let ng = g.step(diagonal);
            if best[nk].is_none_or(|b| ng.value() < b.value()) {
                best[nk] = Some(ng);
                parent[nk] = k;
                open.push(Open {
                    f: ng.value() + octile_distance(next, goal),
                    g: ng,
                    cell: next,
                });
            }
        }
    }
    Err(PlanError::NoPath)
}

/// A* between world points; returns waypoints at cell centers.
pub fn astar(grid: &OccupancyGrid, start: Vec2, goal: Vec2) -> Result<Vec<Vec2>, PlanError> {
    let path = astar_cells(grid, grid.cell_of(start), grid.cell_of(goal))?;
    Ok(path.cells.into_iter().map(|c| grid.center(c)).collect())
}

pub fn center_of_mass(points: &[Vec2]) -> Option<Vec2> {
    if points.is_empty() {
        return None;
    }
    let sum = points.iter().fold(Vec2::ZERO, |acc, &p| acc + p);
    Some(sum / points.len() as f64)
}

/// Evenly spaced slots on an arc of radius `arc_radius` centered at `com`,
/// opening away from `push_dir` and symmetric about the push axis.
pub fn arc_slots(com: Vec2, push_dir: Vec2, n: usize, p: &ArcHerdingParams) -> Vec<Vec2> {
    let back = -push_dir.normalized().unwrap_or(Vec2::new(1.0, 0.0));
    (0..n)
        .map(|k| {
            let angle = if n == 1 {
                0.0
            } else {
                -p.arc_span / 2.0 + p.arc_span * k as f64 / (n - 1) as f64
            };
            com + Rotation::new(angle).apply(back) * p.arc_radius
        })
        .collect()
}

/// First waypoint farther than `reach` from `from`, or the goal center.
pub fn current_waypoint(from: Vec2, path: &[Vec2], reach: f64) -> Vec2 {
    path.iter()
        .copied()
        .find(|w| w.distance(from) > reach)
        .unwrap_or(crate::control::GOAL_CENTER)
}

/// One control step of the comparator: planar velocity commands for every
/// herder, saturated to `v_max`.
pub fn arc_herding_step(
    herders: &[Vec2],
    targets: &[Vec2],
    path: &[Vec2],
    grid: &OccupancyGrid,
    fields: &[ObstacleField],
    p: &ArcHerdingParams,
    v_max: f64,
) -> Vec<Vec2> {
    let Some(com) = center_of_mass(targets) else {
        return vec![Vec2::ZERO; herders.len()];
    };
    let waypoint = current_waypoint(com, path, p.grid_resolution);
    let push = (waypoint - com).normalized().unwrap_or(Vec2::new(1.0, 0.0));
    let mut slots = arc_slots(com, push, herders.len(), p);
    for slot in &mut slots {
        let c = grid.cell_of(*slot);
        if grid.is_occupied(c) {
            if let Some(free) = grid.nearest_free(c) {
                *slot = grid.center(free);
            }
        }
    }
    // Assign slots by angular order around the center of mass so herders
    // do not cross over each other.
    let back = -push;
    let mut order: Vec<usize> = (0..herders.len()).collect();
    order.sort_by(|&a, &b| {
        let aa = signed_angle(back, herders[a] - com);
        let ab = signed_angle(back, herders[b] - com);
        aa.total_cmp(&ab).then(a.cmp(&b))
    });
    let mut commands = vec![Vec2::ZERO; herders.len()];
    for (slot_index, &i) in order.iter().enumerate() {
        let h = herders[i];
        let mut u = (slots[slot_index] - h) * p.com_gain;
        for f in fields {
            if let Ok(s) = f.sample(h) {
                u += s.force;
            }
        }
        commands[i] = u.clamp_norm(v_max).0;
    }
    commands
}
