use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approx::assert_relative_eq;
use preytaxis::RunConfig;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.cfg"))
}

fn preytaxis(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preytaxis"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("PREYTAXIS_OUT")
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn small_run_config(dir: &Path, extra: &str) -> PathBuf {
    let text = fs::read_to_string(scenario("fig2")).unwrap();
    let text = text
        .replace("n = 256", "n = 32")
        .replace("t_end = 2000", "t_end = 2")
        .replace("snapshot_interval = 10", "snapshot_interval = 0.5")
        .replace("steady_min_time = 100", "steady_min_time = 0")
        .replace("scenario = fig2", "scenario = small");
    let path = dir.join("small.cfg");
    fs::write(&path, format!("{text}{extra}")).unwrap();
    path
}

#[test]
fn every_shipped_scenario_parses() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(cfg.scenario, path.file_stem().unwrap().to_str().unwrap());
        cfg.parameters.validate().unwrap();
        count += 1;
    }
    assert!(count >= 18, "{count} scenario files");
}

#[test]
fn thresholds_table1() {
    let out = tempfile::tempdir().unwrap();
    let o = preytaxis(&["thresholds", "--config", scenario("table1").to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.path().join("table1_thresholds.csv"));
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[5][0], "6");
    let chi_s6: f64 = rows[5][1].parse().unwrap();
    assert_relative_eq!(chi_s6, 6.05, max_relative = 5e-3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("k = 6 (SteadyState)"));
}

#[test]
fn missing_config_is_a_config_error() {
    let out = tempfile::tempdir().unwrap();
    let o = preytaxis(&["thresholds", "--config", "/nonexistent/table.cfg"], out.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_run_config(dir.path(), "stray = 1\n");
    let o = preytaxis(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stray"));
}

#[test]
fn vanishing_sensitivity_is_a_math_error() {
    let dir = tempfile::tempdir().unwrap();
    // w_bar = 0.711... for these rates, so a = w_bar makes phi(w_bar) = 0.
    let p = RunConfig::load(&scenario("table1")).unwrap().parameters;
    let w = preytaxis_core::model::equilibrium(&p).unwrap().w;
    let text = fs::read_to_string(scenario("table1")).unwrap().replace("a = 0.1", &format!("a = {w:?}"));
    let path = dir.path().join("zero.cfg");
    fs::write(&path, text).unwrap();
    let o = preytaxis(&["thresholds", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_table2_rows_are_ordered() {
    let out = tempfile::tempdir().unwrap();
    let o = preytaxis(&["sweep", "--config", scenario("table2").to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&out.path().join("table2_sweep.csv"));
    let ls: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    let want: Vec<String> = (1..=16).map(|l| l.to_string()).collect();
    assert_eq!(ls, want);
    let k0: Vec<u32> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(k0, vec![1, 2, 3, 4, 5, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]);
}

#[test]
fn sweep_range_flag_and_empty_range() {
    let out = tempfile::tempdir().unwrap();
    let cfg = scenario("table1");
    let o = preytaxis(&["sweep", "--config", cfg.to_str().unwrap(), "--L", "3:5"], out.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&out.path().join("table1_sweep.csv")).len(), 3);
    let o = preytaxis(&["sweep", "--config", cfg.to_str().unwrap(), "--L", "5:4"], out.path());
    assert_eq!(o.status.code(), Some(2));
    let o = preytaxis(&["sweep", "--config", cfg.to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(2), "table1 has no length range");
}

#[test]
fn k2_verdicts() {
    let out = tempfile::tempdir().unwrap();
    let cfg = scenario("table1");
    let o = preytaxis(&["k2", "--config", cfg.to_str().unwrap(), "--k", "6"], out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let ledger = csv_rows(&out.path().join("table1_k2_k6.csv"));
    let k2: f64 = ledger.iter().find(|r| r[0] == "K2").unwrap()[1].parse().unwrap();
    assert!(k2 > 0.0);
    let verdicts = csv_rows(&out.path().join("table1_verdicts.csv"));
    let steady = |k: &str| verdicts.iter().find(|r| r[0] == k && r[1] == "SteadyState").unwrap()[2].clone();
    assert_eq!(steady("6"), "Stable");
    assert_eq!(steady("3"), "Unstable");

    let o = preytaxis(&["k2", "--config", cfg.to_str().unwrap(), "--k", "0"], out.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_writes_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_run_config(dir.path(), "");
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = preytaxis(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "7"], &out);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for name in ["small_snapshots.csv", "small_probes.csv", "small_report.csv", "small_monitor.log"] {
        let x = fs::read(a.join(name)).unwrap();
        assert!(!x.is_empty(), "{name}");
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name}");
    }
    let snaps = csv_rows(&a.join("small_snapshots.csv"));
    assert_eq!(snaps.len() % 32, 0);
    assert_eq!(snaps.len() / 32, 5, "t = 0, 0.5, 1, 1.5 and the final state at 2");
}

#[test]
fn grid_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_run_config(dir.path(), "");
    let out = dir.path().join("o");
    let o = preytaxis(&["simulate", "--config", cfg.to_str().unwrap(), "--grid-n", "48"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&out.join("small_snapshots.csv")).len() % 48, 0);
}

#[test]
fn blowup_guard_exits_with_runtime_code_and_keeps_the_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_run_config(dir.path(), "");
    let text = fs::read_to_string(&cfg).unwrap().replace("[solver]", "[solver]\nblowup = 1.5");
    fs::write(&cfg, text).unwrap();
    let out = dir.path().join("o");
    let o = preytaxis(&["simulate", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(4));
    let log = fs::read_to_string(out.join("small_monitor.log")).unwrap();
    assert!(log.lines().count() >= 2);
}

#[test]
fn spectrum_of_a_profile() {
    let dir = tempfile::tempdir().unwrap();
    let n = 64;
    let h = 7.0 / n as f64;
    let mut text = String::from("x,pure\n");
    for i in 0..n {
        let x = (i as f64 + 0.5) * h;
        text += &format!("{x},{}\n", 2.0 + 0.5 * (3.0 * std::f64::consts::PI * x / 7.0).cos());
    }
    let profile = dir.path().join("profile.csv");
    fs::write(&profile, text).unwrap();
    let out = dir.path().join("o");
    let o = preytaxis(
        &["spectrum", "--config", scenario("table1").to_str().unwrap(), "--profile", profile.to_str().unwrap()],
        &out,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("table1_spectrum.csv"));
    let a: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_relative_eq!(a[0], 2.0, epsilon = 1e-9);
    assert_relative_eq!(a[3], 0.5, epsilon = 1e-9);
    assert!(a.iter().enumerate().all(|(k, x)| k == 0 || k == 3 || x.abs() < 1e-9));
}

#[test]
fn out_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_preytaxis"))
        .args(["thresholds", "--config", scenario("table3").to_str().unwrap()])
        .env("PREYTAXIS_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("table3_thresholds.csv").exists());
}

#[test]
fn out_directory_from_the_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_file");
    let text = fs::read_to_string(scenario("table1"))
        .unwrap()
        .replace("scenario = table1", &format!("scenario = table1\nout = {}", target.display()));
    let cfg = dir.path().join("table1.cfg");
    fs::write(&cfg, text).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_preytaxis"))
        .args(["thresholds", "--config", cfg.to_str().unwrap()])
        .env_remove("PREYTAXIS_OUT")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(target.join("table1_thresholds.csv").exists());
}
