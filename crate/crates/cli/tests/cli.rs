use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn shepherd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shepherd"))
        .args(args)
        .output()
        .unwrap()
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const SHORT: &str =
    "n_herders = 1\nn_targets = 1\nrandom_obstacles = 0\nobstacle = 15, 15, 30, 10, 3*pi/4\nt_max = 20\n";

#[test]
fn missing_config_is_usage_error() {
    let out = shepherd(&["run"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unreadable_config_is_usage_error() {
    let out = shepherd(&["validate", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_value_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "a.cfg", SHORT);
    let out = shepherd(&["validate", "--config", &cfg, "--set", "gamma=1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
}

#[test]
fn overlapping_obstacles_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "a.cfg",
        "random_obstacles = 0\nobstacle = 20, 0, 4, 4, 0\nobstacle = 25, 0, 4, 4, 0\n",
    );
    let out = shepherd(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("obstacles 0 and 1"));
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "a.cfg", SHORT);
    let out_dir = dir.path().join("out");
    let out = shepherd(&[
        "run",
        "--config",
        &cfg,
        "--seed",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = out_dir.join("seed_2");
    for f in [
        "trace.csv",
        "metrics.json",
        "config.cfg",
        "plots/trajectory.svg",
        "plots/radii.svg",
        "plots/radii.csv",
        "plots/chi.csv",
        "plots/snapshot_start.svg",
        "plots/snapshot_end.svg",
    ] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn seed_changes_trace_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "a.cfg", SHORT);
    let trace = |seed: &str, sub: &str| {
        let o = dir.path().join(sub);
        let out = shepherd(&["run", "--config", &cfg, "--seed", seed, "--out", o.to_str().unwrap()]);
        assert!(out.status.success());
        fs::read(o.join(format!("seed_{seed}")).join("trace.csv")).unwrap()
    };
    let a = trace("7", "a");
    let b = trace("7", "b");
    let c = trace("8", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let via_set = dir.path().join("d");
    let out = shepherd(&[
        "run",
        "--config",
        &cfg,
        "--set",
        "seed=7",
        "--out",
        via_set.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(via_set.join("seed_7/trace.csv")).unwrap(), a);
}

#[test]
fn compare_prints_both_methods_regardless_of_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "a.cfg", SHORT);
    let rows = |methods: &str| {
        let out = shepherd(&[
            "compare",
            "--config",
            &cfg,
            "--runs",
            "1",
            "--jobs",
            "1",
            "--methods",
            methods,
        ]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let mut lines: Vec<String> = text.lines().skip(1).map(str::to_owned).collect();
        lines.sort();
        lines
    };
    let a = rows("proposed,baseline");
    assert_eq!(a.len(), 2);
    assert!(a[0].starts_with("baseline") && a[1].starts_with("proposed"));
    assert_eq!(a, rows("baseline,proposed"));
}

#[test]
fn gen_scenario_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.cfg");
    let b = dir.path().join("b.cfg");
    for p in [&a, &b] {
        let out = shepherd(&["gen-scenario", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("obstacle =")).count(), 7);
    let out = shepherd(&["validate", "--config", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn impossible_generation_exits_3() {
    let out = shepherd(&["gen-scenario", "--set", "rho_0=12", "--set", "random_obstacles=7"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn plot_redraws_from_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "a.cfg", SHORT);
    let o = dir.path().join("o");
    assert!(
        shepherd(&["run", "--config", &cfg, "--seed", "1", "--out", o.to_str().unwrap()])
            .status
            .success()
    );
    let p = dir.path().join("p");
    let trace = o.join("seed_1/trace.csv");
    let out = shepherd(&[
        "plot",
        "--config",
        &cfg,
        "--trace",
        trace.to_str().unwrap(),
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        fs::read(p.join("radii.csv")).unwrap(),
        fs::read(o.join("seed_1/plots/radii.csv")).unwrap()
    );
}

#[test]
fn help_lists_every_key() {
    let out = shepherd(&["batch", "--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for k in shepherd::scenario::KEYS {
        assert!(text.contains(k.name), "{} missing from help", k.name);
    }
}
