use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chemowave"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn small_linear(dir: &Path) -> PathBuf {
    let mut cfg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(configs().join("linear.json")).unwrap()).unwrap();
    cfg["problem"]["spec"]["domain"]["cells"] = 256.into();
    let path = dir.join("linear.json");
    fs::write(&path, cfg.to_string()).unwrap();
    path
}

#[test]
fn compare_writes_five_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_linear(dir.path());
    let out = dir.path().join("out");
    let o = run(&[
        "compare",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--enforce",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["config.json", "fronts.csv", "plot.py", "profiles.csv", "summary.csv"]
    );
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.matches("PASS").count(), 2);
}

#[test]
fn enforce_turns_tolerance_misses_into_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(small_linear(dir.path())).unwrap()).unwrap();
    cfg["tolerances"] = serde_json::json!({"density": 1e-9, "front": 5.0});
    let path = dir.path().join("strict.json");
    fs::write(&path, cfg.to_string()).unwrap();
    let out = dir.path().join("out");
    let args = [
        "compare",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let mut enforced = args.to_vec();
    enforced.push("--enforce");
    assert_eq!(run(&enforced).status.code(), Some(3));
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut cfg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(small_linear(dir.path())).unwrap()).unwrap();
    cfg["problem"]["spec"]["diffusion"] = (-1.0).into();
    fs::write(&path, cfg.to_string()).unwrap();
    let o = run(&[
        "solve-pde",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diffusion"));

    fs::write(&path, "{not json").unwrap();
    let o = run(&["front", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["front", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numeric_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let md = dir.path().join("device.json");
    let mut spec: serde_json::Value = serde_json::from_str::<serde_json::Value>(
        &fs::read_to_string(configs().join("device_low_nutrient.json")).unwrap(),
    )
    .unwrap()["problem"]["spec"]
        .clone();
    // drive strong enough that the closed-form map hits its singularity
    spec["psi2"] = serde_json::json!({"kind": "constant", "value": 40.0});
    fs::write(&md, spec.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "microdevice",
        "--config",
        md.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("blows up"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up"));
}

#[test]
fn solve_pde_and_analytic_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_linear(dir.path());
    let out = dir.path().join("out");
    let c = cfg.to_str().unwrap();
    let o = out.to_str().unwrap();
    assert!(run(&["solve-pde", "--config", c, "--out", o]).status.success());
    let csv = fs::read_to_string(out.join("solution.csv")).unwrap();
    assert!(csv.starts_with("t,x,u\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 256);

    assert!(run(&["solve-pde", "--config", c, "--out", o, "--format", "json"])
        .status
        .success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("solution.json")).unwrap()).unwrap();
    assert_eq!(v["times"].as_array().unwrap().len(), 2);

    assert!(run(&["solve-analytic", "--config", c, "--out", o]).status.success());
    let csv = fs::read_to_string(out.join("analytic.csv")).unwrap();
    assert!(csv.starts_with("t,x,u_outer,u_composite\n"));
}

#[test]
fn front_csv_has_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = configs().join("linear.json");
    let o = run(&[
        "front",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--samples",
        "11",
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("front.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "t,x_star");
    assert_eq!(rows.len(), 12);
    let last: Vec<f64> = rows[11].split(',').map(|v| v.parse().unwrap()).collect();
    // x*(t) = (b/a)(e^{at} - 1) with a = 2, b = 1
    assert!((last[1] - 0.5 * ((2.0 * last[0]).exp() - 1.0)).abs() < 1e-12);
}

#[test]
fn oscillatory_table_and_regime_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = configs().join("osc_slow.json");
    let o = run(&[
        "oscillatory",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("selected regime slow"));
    let csv = fs::read_to_string(out.join("oscillatory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2001);

    let o = run(&[
        "oscillatory",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--regime",
        "dominant-growth",
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("tabulating dominant_growth"));

    let o = run(&[
        "oscillatory",
        "--config",
        configs().join("linear.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn microdevice_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "microdevice",
        "--regime",
        "high_nutrient",
        "--drive",
        "steady",
        "--samples",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let front = fs::read_to_string(out.join("front.csv")).unwrap();
    let last: Vec<f64> = front
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    // x*(1) = 9.5 (e^{0.1} - 1)
    assert!((last[1] - 9.5 * 0.1f64.exp_m1()).abs() < 1e-10);
    assert_eq!(
        fs::read_to_string(out.join("density.csv")).unwrap().lines().count(),
        1 + 1024
    );

    let o = run(&["microdevice", "--regime", "sideways"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_writes_reports_in_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = configs().join("sweep_omega.json");
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains("omega=0.1"));
    assert!(rows[2].contains("omega=0.05"));
    let ratio: f64 = rows[2].split(',').nth(3).unwrap().parse().unwrap();
    assert!((0.35..=0.65).contains(&ratio), "{ratio}");
    assert!(out.join("summary.csv").exists());
}
