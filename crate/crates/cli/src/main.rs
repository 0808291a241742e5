use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use shepherd::engine::{self, BatchSummary, EventCounts, MetricSample, RunMetrics, Simulation};
use shepherd::error::{ConfigError, EngineError, TraceError};
use shepherd::plots::{emit_plots, PlotScene};
use shepherd::scenario::{key_reference, load_config, Mode, ScenarioConfig};
use shepherd::trace::{read_trace, write_trace, AgentKind};

const USAGE: u8 = 1;
const INVALID: u8 = 2;
const PHYSICS: u8 = 3;

#[derive(Parser)]
#[command(name = "shepherd", version, about = "Obstacle-aware shepherding simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (`key = value` per line)
    #[arg(long)]
    config: PathBuf,
    /// Override one key, e.g. `--set n_targets=20` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed (same as `--set seed=N`)
    #[arg(long)]
    seed: Option<u64>,
    /// ideal, embodied or baseline; replaces the file's `mode`
    #[arg(long)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write trace, metrics and plots
    #[command(after_long_help = keys_help())]
    Run {
        #[command(flatten)]
        common: Common,
        /// Output directory; files go to <out>/seed_<seed>/
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Run consecutive seeds and summarise capture statistics
    #[command(after_long_help = keys_help())]
    Batch {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        runs: u64,
        /// Worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory for batch.csv
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the proposed controller and the arc-herding baseline on the same seeds
    #[command(after_long_help = keys_help())]
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        runs: u64,
        #[arg(long)]
        jobs: Option<usize>,
        /// Order of the table rows
        #[arg(long, value_delimiter = ',', default_value = "proposed,baseline")]
        methods: Vec<Method>,
    },
    /// Redraw plots from a stored trace
    #[command(after_long_help = keys_help())]
    Plot {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
    /// Check a scenario and its initial placement
    #[command(after_long_help = keys_help())]
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Draw a random scenario and print it as an explicit config
    #[command(name = "gen-scenario", after_long_help = keys_help())]
    GenScenario {
        /// Base configuration (defaults when omitted)
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<Mode>,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Method {
    Proposed,
    Baseline,
}

fn keys_help() -> String {
    format!("{}\n{}", key_reference(Mode::Ideal), key_reference(Mode::Embodied))
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match e {
            ConfigError::Io { .. } => USAGE,
            _ => INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::Validation(_) => INVALID,
            _ => PHYSICS,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        Failure {
            code: USAGE,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: USAGE,
            message: e.to_string(),
        }
    }
}

fn load(
    path: Option<&Path>,
    overrides: &[String],
    seed: Option<u64>,
    mode: Option<Mode>,
) -> Result<ScenarioConfig, Failure> {
    let mut all = overrides.to_vec();
    if let Some(s) = seed {
        all.push(format!("seed={s}"));
    }
    Ok(match path {
        Some(p) => load_config(p, mode, &all)?,
        None => ScenarioConfig::from_text("", mode, &all)?,
    })
}

fn load_common(c: &Common) -> Result<ScenarioConfig, Failure> {
    load(Some(&c.config), &c.overrides, c.seed, c.mode)
}

fn jobs_or_default(jobs: Option<usize>) -> usize {
    jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.3}"))
}

fn events_json(e: &EventCounts) -> serde_json::Value {
    json!({
        "singular": e.singular,
        "penetrations": e.penetrations,
        "saturations": e.saturations,
        "no_path": e.no_path,
    })
}

fn plot_scene(sim: &Simulation) -> PlotScene {
    PlotScene {
        obstacles: sim.fields().iter().map(|f| f.obstacle.clone()).collect(),
        rho_g: sim.config().rho_g,
    }
}

fn cmd_run(cfg: &ScenarioConfig, out: &Path) -> Result<(), Failure> {
    let sim = Simulation::new(cfg)?;
    let scene = plot_scene(&sim);
    let (trace, m) = sim.run(true)?;
    let dir = out.join(format!("seed_{}", cfg.seed));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.cfg"), cfg.to_text())?;
    write_trace(&trace, &dir.join("trace.csv"))?;
    let metrics = json!({
        "units": "seconds, meters",
        "seed": cfg.seed,
        "mode": cfg.mode.to_string(),
        "steps": m.steps,
        "final_time": m.final_time,
        "final_chi": m.final_chi,
        "t_all_captured": m.t_all_captured,
        "held": m.held,
        "max_wheel_speed": m.max_wheel_speed,
        "min_clearance": if m.min_clearance.is_finite() { Some(m.min_clearance) } else { None },
        "events": events_json(&m.events),
    });
    fs::write(
        dir.join("metrics.json"),
        serde_json::to_string_pretty(&metrics).expect("plain json") + "\n",
    )?;
    if !trace.records.is_empty() {
        emit_plots(&trace, &m, &scene, &dir.join("plots"))?;
    }
    println!(
        "seed {}  t = {:.3} s  chi = {:.3}  all captured at {}  held {}  penetrations {}",
        cfg.seed,
        m.final_time,
        m.final_chi,
        opt(m.t_all_captured),
        m.held,
        m.events.penetrations
    );
    println!("wrote {}", dir.display());
    Ok(())
}

fn print_batch(label: &str, b: &BatchSummary) {
    println!(
        "{label:<10} {:>6.3} ± {:<6.3} {:>8.2} {:>10} {:>6}",
        b.mean_chi,
        b.std_chi,
        b.capture_rate,
        opt(b.median_capture_time()),
        b.runs.iter().filter(|r| r.held).count()
    );
}

fn batch_header() {
    println!(
        "{:<10} {:>15} {:>8} {:>10} {:>6}",
        "method", "chi (mean ± std)", "captured", "median t", "held"
    );
}

fn cmd_batch(cfg: &ScenarioConfig, runs: u64, jobs: usize, out: Option<&Path>) -> Result<(), Failure> {
    let b = engine::run_batch(cfg, runs, jobs)?;
    println!(
        "{:>8} {:>8} {:>12} {:>6} {:>12}",
        "seed", "chi", "captured at", "held", "penetrations"
    );
    for r in &b.runs {
        println!(
            "{:>8} {:>8.3} {:>12} {:>6} {:>12}",
            r.seed,
            r.final_chi,
            opt(r.t_all_captured),
            r.held,
            r.events.penetrations
        );
    }
    batch_header();
    print_batch(&cfg.mode.to_string(), &b);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let mut s = String::from(
            "# t_all_captured, final_time [s]\nseed,final_chi,t_all_captured,held,final_time,penetrations\n",
        );
        for r in &b.runs {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.seed,
                r.final_chi,
                r.t_all_captured.map_or(String::new(), |t| t.to_string()),
                r.held,
                r.final_time,
                r.events.penetrations
            ));
        }
        fs::write(dir.join("batch.csv"), s)?;
    }
    Ok(())
}

fn cmd_compare(cfg: &ScenarioConfig, runs: u64, jobs: usize, methods: &[Method]) -> Result<(), Failure> {
    batch_header();
    for m in methods {
        let mut c = cfg.clone();
        let label = match m {
            Method::Proposed => {
                if c.mode == Mode::Baseline {
                    c.mode = Mode::Ideal;
                }
                "proposed"
            }
            Method::Baseline => {
                c.mode = Mode::Baseline;
                "baseline"
            }
        };
        print_batch(label, &engine::run_batch(&c, runs, jobs)?);
    }
    Ok(())
}

/// Capture-fraction samples recomputed from the recorded frames.
fn metrics_from_trace(trace: &shepherd::trace::Trace, rho_g: f64) -> RunMetrics {
    let samples: Vec<MetricSample> = trace
        .frames()
        .into_iter()
        .map(|f| MetricSample {
            t: f[0].t,
            chi: engine::capture_fraction(
                f.iter()
                    .filter(|r| r.kind == AgentKind::Target)
                    .map(|r| shepherd::Vec2::new(r.x, r.y)),
                rho_g,
            ),
            herder_mean: 0.0,
            herder_std: 0.0,
            target_mean: 0.0,
            target_std: 0.0,
        })
        .collect();
    RunMetrics {
        final_time: samples.last().map_or(0.0, |s| s.t),
        final_chi: samples.last().map_or(0.0, |s| s.chi),
        samples,
        t_all_captured: None,
        held: false,
        events: EventCounts::default(),
        max_wheel_speed: 0.0,
        min_clearance: f64::INFINITY,
        steps: 0,
    }
}

fn cmd_plot(cfg: &ScenarioConfig, trace_path: &Path, out: &Path) -> Result<(), Failure> {
    let trace = read_trace(trace_path)?;
    let scene = PlotScene {
        obstacles: cfg
            .obstacle_fields()
            .map_err(|e| Failure {
                code: INVALID,
                message: e.to_string(),
            })?
            .into_iter()
            .map(|f| f.obstacle)
            .collect(),
        rho_g: cfg.rho_g,
    };
    let files = emit_plots(&trace, &metrics_from_trace(&trace, cfg.rho_g), &scene, out)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn cmd_validate(cfg: &ScenarioConfig) -> Result<(), Failure> {
    engine::validate_scenario(cfg).map_err(|v| Failure::from(EngineError::Validation(v)))?;
    println!(
        "ok: {} herders, {} targets, mode {}",
        cfg.n_herders, cfg.n_targets, cfg.mode
    );
    Ok(())
}

fn cmd_gen(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<(), Failure> {
    let explicit = engine::generate_scenario(cfg)?;
    let text = explicit.to_text();
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { common, out } => cmd_run(&load_common(&common)?, &out),
        Command::Batch {
            common,
            runs,
            jobs,
            out,
        } => cmd_batch(&load_common(&common)?, runs, jobs_or_default(jobs), out.as_deref()),
        Command::Compare {
            common,
            runs,
            jobs,
            methods,
        } => cmd_compare(&load_common(&common)?, runs, jobs_or_default(jobs), &methods),
        Command::Plot { common, trace, out } => cmd_plot(&load_common(&common)?, &trace, &out),
        Command::Validate { common } => cmd_validate(&load_common(&common)?),
        Command::GenScenario {
            config,
            overrides,
            seed,
            mode,
            out,
        } => cmd_gen(&load(config.as_deref(), &overrides, seed, mode)?, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
