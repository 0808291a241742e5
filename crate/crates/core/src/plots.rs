//! Static SVG plots of a run and the series behind them.
//!
//! Every figure comes with a CSV holding exactly the numbers that were drawn.
//! Numbers are formatted with Rust's locale-independent float printing, so
//! the emitted files depend only on the trace and metrics.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::RunMetrics;
use crate::error::TraceError;
use crate::geometry::{ConvexPolygon, Vec2};
use crate::trace::{AgentKind, Trace, TraceRecord};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 40.0;
/// Trajectories are thinned to at most this many segments per agent.
const MAX_SEGMENTS: usize = 400;

const HERDER_LIGHT: [u8; 3] = [170, 200, 255];
const HERDER_DARK: [u8; 3] = [0, 40, 160];
const TARGET_LIGHT: [u8; 3] = [255, 190, 240];
const TARGET_DARK: [u8; 3] = [150, 0, 110];

/// What the plots need besides the trace.
#[derive(Debug, Clone)]
pub struct PlotScene {
    pub obstacles: Vec<ConvexPolygon>,
    pub rho_g: f64,
}

/// Radial statistics of one recorded frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusRow {
    pub t: f64,
    pub herder_mean: f64,
    pub herder_std: f64,
    pub target_mean: f64,
    pub target_std: f64,
}

fn mean_std(r: &[f64]) -> (f64, f64) {
    if r.is_empty() {
        return (0.0, 0.0);
    }
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let var = r.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-frame mean and population std of distances to the goal center.
pub fn radius_series(trace: &Trace) -> Vec<RadiusRow> {
    trace
        .frames()
        .into_iter()
        .map(|frame| {
            let radii = |kind| -> Vec<f64> {
                frame
                    .iter()
                    .filter(|r| r.kind == kind)
                    .map(|r| Vec2::new(r.x, r.y).norm())
                    .collect()
            };
            let (hm, hs) = mean_std(&radii(AgentKind::Herder));
            let (tm, ts) = mean_std(&radii(AgentKind::Target));
            RadiusRow {
                t: frame[0].t,
                herder_mean: hm,
                herder_std: hs,
                target_mean: tm,
                target_std: ts,
            }
        })
        .collect()
}

/// World-to-canvas transform with equal axis scales.
struct Frame {
    min: Vec2,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Vec2>) -> Self {
        let (mut lo, mut hi) = (
            Vec2::new(f64::INFINITY, f64::INFINITY),
            Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in points {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9) * 1.05;
        let mid = (lo + hi) * 0.5;
        Self {
            min: mid - Vec2::new(span, span) * 0.5,
            scale: (WIDTH - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min.x) * self.scale,
            HEIGHT - MARGIN - (p.y - self.min.y) * self.scale,
        )
    }
}

fn svg_open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn lerp_color(a: [u8; 3], b: [u8; 3], s: f64) -> String {
    let c = |i: usize| (a[i] as f64 + (b[i] as f64 - a[i] as f64) * s).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(0), c(1), c(2))
}

fn draw_world(out: &mut String, f: &Frame, scene: &PlotScene) {
    let (cx, cy) = f.map(Vec2::ZERO);
    let _ = writeln!(
        out,
        r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="#c8f0c8" stroke="#208020" stroke-dasharray="6 4"/>"##,
        scene.rho_g * f.scale
    );
    for o in &scene.obstacles {
        let pts: Vec<String> = o
            .vertices()
            .iter()
            .map(|v| {
                let (x, y) = f.map(*v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="#e05050" fill-opacity="0.6" stroke="#a00000"/>"##,
            pts.join(" ")
        );
    }
}

fn scene_points<'a>(trace: &'a Trace, scene: &'a PlotScene) -> impl Iterator<Item = Vec2> + 'a {
    let r = scene.rho_g;
    trace
        .records
        .iter()
        .map(|q| Vec2::new(q.x, q.y))
        .chain(scene.obstacles.iter().flat_map(|o| o.vertices().iter().copied()))
        .chain([Vec2::new(-r, -r), Vec2::new(r, r)])
}

/// Positions of every agent over time, keyed by (kind, id).
fn tracks(trace: &Trace) -> Vec<((AgentKind, usize), Vec<&TraceRecord>)> {
    let mut out: Vec<((AgentKind, usize), Vec<&TraceRecord>)> = Vec::new();
    for r in &trace.records {
        let key = (r.kind, r.id);
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => out.push((key, vec![r])),
        }
    }
    out
}

fn trajectory_svg(trace: &Trace, scene: &PlotScene) -> String {
    let f = Frame::fit(scene_points(trace, scene));
    let times = trace.times();
    let (t0, t1) = (times[0], *times.last().unwrap());
    let span = if t1 > t0 { t1 - t0 } else { 1.0 };
    let mut out = String::new();
    svg_open(&mut out, "trajectories");
    draw_world(&mut out, &f, scene);
    for ((kind, _), pts) in tracks(trace) {
        let (light, dark) = match kind {
            AgentKind::Herder => (HERDER_LIGHT, HERDER_DARK),
            AgentKind::Target => (TARGET_LIGHT, TARGET_DARK),
        };
        let stride = pts.len().div_ceil(MAX_SEGMENTS).max(1);
        let mut kept: Vec<&TraceRecord> = pts.iter().step_by(stride).copied().collect();
        if kept.last().map(|r| r.t) != pts.last().map(|r| r.t) {
            kept.push(pts[pts.len() - 1]);
        }
        for w in kept.windows(2) {
            let (x1, y1) = f.map(Vec2::new(w[0].x, w[0].y));
            let (x2, y2) = f.map(Vec2::new(w[1].x, w[1].y));
            let color = lerp_color(light, dark, (w[1].t - t0) / span);
            let _ = writeln!(
                out,
                r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{color}" stroke-width="1.5"/>"#
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn snapshot_svg(frame: &[TraceRecord], trace: &Trace, scene: &PlotScene, title: &str) -> String {
    let f = Frame::fit(scene_points(trace, scene));
    let mut out = String::new();
    svg_open(&mut out, title);
    draw_world(&mut out, &f, scene);
    for r in frame {
        let (x, y) = f.map(Vec2::new(r.x, r.y));
        match r.kind {
            AgentKind::Herder => {
                let _ = writeln!(
                    out,
                    r##"<polygon points="{:.3},{y:.3} {x:.3},{:.3} {:.3},{y:.3} {x:.3},{:.3}" fill="#0030c0"/>"##,
                    x - 6.0,
                    y - 6.0,
                    x + 6.0,
                    y + 6.0
                );
            }
            AgentKind::Target => {
                let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="#c000a0"/>"##);
            }
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">t = {}</text>"#,
        frame[0].t
    );
    out.push_str("</svg>\n");
    out
}

fn radii_svg(rows: &[RadiusRow], chi: &[(f64, f64)], rho_g: f64) -> String {
    let t0 = rows[0].t;
    let t1 = rows.last().unwrap().t.max(t0 + 1e-9);
    let r_max = rows
        .iter()
        .map(|r| (r.herder_mean + r.herder_std).max(r.target_mean + r.target_std))
        .fold(rho_g, f64::max)
        * 1.05;
    let px = |t: f64| MARGIN + (t - t0) / (t1 - t0) * (WIDTH - 2.0 * MARGIN);
    let py = |r: f64| HEIGHT - MARGIN - r / r_max * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    svg_open(&mut out, "distance from goal");
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let band = |mean: fn(&RadiusRow) -> f64, std: fn(&RadiusRow) -> f64| {
        let upper = rows
            .iter()
            .map(|r| format!("{:.3},{:.3}", px(r.t), py(mean(r) + std(r))));
        let lower = rows
            .iter()
            .rev()
            .map(|r| format!("{:.3},{:.3}", px(r.t), py((mean(r) - std(r)).max(0.0))));
        upper.chain(lower).collect::<Vec<_>>().join(" ")
    };
    let line = |mean: fn(&RadiusRow) -> f64| {
        rows.iter()
            .map(|r| format!("{:.3},{:.3}", px(r.t), py(mean(r))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        out,
        r##"<polygon points="{}" fill="#0030c0" fill-opacity="0.2"/>"##,
        band(|r| r.herder_mean, |r| r.herder_std)
    );
    let _ = writeln!(
        out,
        r##"<polygon points="{}" fill="#c000a0" fill-opacity="0.2"/>"##,
        band(|r| r.target_mean, |r| r.target_std)
    );
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#0030c0" stroke-width="2"/>"##,
        line(|r| r.herder_mean)
    );
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#c000a0" stroke-width="2"/>"##,
        line(|r| r.target_mean)
    );
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#208020" stroke-width="2" stroke-dasharray="8 5"/>"##,
        WIDTH - MARGIN,
        y = py(rho_g)
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">radius [m] vs t [s], t in [{t0}, {t1}]</text>"#
    );

    // capture fraction inset, top right
    let (iw, ih) = (160.0, 80.0);
    let (ix, iy) = (WIDTH - MARGIN - iw - 10.0, MARGIN + 10.0);
    let _ = writeln!(
        out,
        r#"<rect x="{ix}" y="{iy}" width="{iw}" height="{ih}" fill="white" stroke="black"/>"#
    );
    if !chi.is_empty() {
        let c0 = chi[0].0;
        let c1 = chi.last().unwrap().0.max(c0 + 1e-9);
        let pts: Vec<String> = chi
            .iter()
            .map(|&(t, c)| format!("{:.3},{:.3}", ix + (t - c0) / (c1 - c0) * iw, iy + ih - c * ih))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">chi</text>"#,
        ix + 4.0,
        iy + 14.0
    );
    out.push_str("</svg>\n");
    out
}

fn radii_csv(rows: &[RadiusRow]) -> String {
    let mut s = String::from("# t [s]; radii [m]\nt,herder_mean,herder_std,target_mean,target_std\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.t, r.herder_mean, r.herder_std, r.target_mean, r.target_std
        );
    }
    s
}

fn chi_csv(chi: &[(f64, f64)]) -> String {
    let mut s = String::from("# t [s]; chi = fraction of targets inside the goal\nt,chi\n");
    for (t, c) in chi {
        let _ = writeln!(s, "{t},{c}");
    }
    s
}

fn trajectory_csv(trace: &Trace) -> String {
    let mut s = String::from("# t [s]; x, y [m]\nt,id,kind,x,y\n");
    for r in &trace.records {
        let kind = match r.kind {
            AgentKind::Herder => "herder",
            AgentKind::Target => "target",
        };
        let _ = writeln!(s, "{},{},{kind},{},{}", r.t, r.id, r.x, r.y);
    }
    s
}

/// Reads back a two-column `t,chi` file written by [`emit_plots`].
pub fn parse_chi_csv(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("t,"))
        .filter_map(|l| {
            let (a, b) = l.split_once(',')?;
            Some((a.parse().ok()?, b.parse().ok()?))
        })
        .collect()
}

/// Reads back the `radii.csv` written by [`emit_plots`].
pub fn parse_radii_csv(text: &str) -> Vec<RadiusRow> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("t,"))
        .filter_map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().ok()).collect::<Option<_>>()?;
            (v.len() == 5).then(|| RadiusRow {
                t: v[0],
                herder_mean: v[1],
                herder_std: v[2],
                target_mean: v[3],
                target_std: v[4],
            })
        })
        .collect()
}

/// Writes the trajectory, radii and snapshot figures with their series into
/// `dir` (created if missing) and returns the written paths.
pub fn emit_plots(
    trace: &Trace,
    metrics: &RunMetrics,
    scene: &PlotScene,
    dir: &Path,
) -> Result<Vec<PathBuf>, TraceError> {
    if trace.records.is_empty() {
        return Err(TraceError::Schema("cannot plot an empty trace".into()));
    }
    fs::create_dir_all(dir)?;
    let rows = radius_series(trace);
    let chi = metrics.chi_series();
    let frames = trace.frames();
    let files = [
        ("trajectory.svg", trajectory_svg(trace, scene)),
        ("trajectory.csv", trajectory_csv(trace)),
        ("radii.svg", radii_svg(&rows, &chi, scene.rho_g)),
        ("radii.csv", radii_csv(&rows)),
        ("chi.csv", chi_csv(&chi)),
        (
            "snapshot_start.svg",
            snapshot_svg(frames[0], trace, scene, "initial configuration"),
        ),
        (
            "snapshot_end.svg",
            snapshot_svg(frames[frames.len() - 1], trace, scene, "final configuration"),
        ),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
