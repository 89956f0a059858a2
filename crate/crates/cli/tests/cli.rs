use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn config(dir: &TempDir, name: &str, body: serde_json::Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body.to_string()).unwrap();
    path
}

fn dwt(args: &[&str], cfg: &Path, envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dwt"));
    cmd.args(args).arg("--config").arg(cfg).env_remove("DWT_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

#[test]
fn classify_golden_example() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.json", serde_json::json!({"potential": fixture("golden.json")}));
    let o = dwt(&["classify"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gamma"], 2.0);
    assert_eq!(v["kappa"], 1);
    assert!((v["c"].as_f64().unwrap() - 1.6180340).abs() < 1e-7);
    assert!((v["w0"].as_f64().unwrap() - 0.2764).abs() < 1e-4);
    assert_eq!(v["regime"], "Barycenter");
}

#[test]
fn sweep_selecting_example_has_the_predicted_slope() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "s.json",
        serde_json::json!({"potential": fixture("selectone.json"), "betas": {"start": 20, "stop": 100, "step": 5}}),
    );
    let out = dir.path().join("sweep.csv");
    let o = dwt(&["sweep", "--out", out.to_str().unwrap()], &cfg, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["beta", "loglam1", "mu0", "mu1", "logF0", "logF1", "logFt0", "logFt1"]);
    assert_eq!(rows.len(), 17);
    let beta: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| -(r[2].parse::<f64>().unwrap() / r[3].parse::<f64>().unwrap()).ln())
        .collect();
    let n = beta.len() as f64;
    let (mx, my) = (beta.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = beta.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = beta.iter().map(|a| (a - mx).powi(2)).sum();
    assert!((sxy / sxx / 1.2 - 1.0).abs() < 0.05, "slope {}", sxy / sxx);

    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.csv.meta.json")).unwrap()).unwrap();
    assert!((meta["fits"]["mu_ratio"].as_f64().unwrap() - 1.2).abs() < 0.06);
    assert_eq!(meta["command"], "sweep");
}

#[test]
fn zero_b_plateau_fails_validation() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "v.json", serde_json::json!({"potential": fixture("invalid_zero_b.json")}));
    let o = dwt(&["validate"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
    let failed: Vec<_> = v["report"]["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["item"], 2);
    assert_eq!(failed[0]["sequence"], "b0");
    assert!(String::from_utf8_lossy(&o.stderr).contains("[FAIL] item 2 (b0)"));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_pool_sizes() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "s.json",
        serde_json::json!({"potential": fixture("mixed.json"), "betas": {"start": 0.5, "stop": 40, "step": 0.5}}),
    );
    let runs: Vec<Vec<u8>> = [("1", "a.csv"), ("4", "b.csv"), ("4", "c.csv")]
        .iter()
        .map(|(threads, name)| {
            let out = dir.path().join(name);
            let o = dwt(&["sweep", "--out", out.to_str().unwrap()], &cfg, &[("DWT_THREADS", threads)]);
            assert_eq!(o.status.code(), Some(0));
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
    let text = String::from_utf8(runs[0].clone()).unwrap();
    let betas: Vec<f64> = csv(&text).1.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(betas.windows(2).all(|w| w[0] < w[1]), "rows keep input order");
}

#[test]
fn phase_grid_marks_invalid_points() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "p.json",
        serde_json::json!({
            "family": {"h0": {"tail": 1.0}, "h1": {"head": "s", "head_len": 1, "tail": "t"}},
            "s": [0.5, 1.0],
            "t": [-1.0, 3.0],
        }),
    );
    let o = dwt(&["phase-grid"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header, ["s", "t", "regime", "gamma", "kappa", "c", "w0", "w1"]);
    let regimes: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(regimes, ["invalid", "SelectOne", "invalid", "Barycenter"]);
    assert_eq!(rows[3][4], "1");
}

#[test]
fn nonselect_desk_schedule_alternates() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "n.json", serde_json::json!({"schedule": fixture("desk_schedule.json")}));
    let o = dwt(&["nonselect"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header, ["k", "beta", "mu0", "mu1", "loglam1", "alpha0", "theta0", "alpha1", "theta1", "delta"]);
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let k: usize = r[0].parse().unwrap();
        let (mu0, mu1): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert_eq!(k % 2 == 0, mu0 > mu1, "stage {k}");
    }
}

#[test]
fn nonselect_failures_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let sched = dir.path().join("sched.json");
    std::fs::write(&sched, r#"{"stages":[{"p":1,"q":10,"eps":0.5,"beta":3.0}]}"#).unwrap();
    // default thresholds reject the stage
    let cfg = config(&dir, "a.json", serde_json::json!({"schedule": "sched.json"}));
    assert_eq!(dwt(&["nonselect"], &cfg, &[]).status.code(), Some(1));
    // relaxed thresholds pass, then the truncation bracket is refused
    let cfg = config(
        &dir,
        "b.json",
        serde_json::json!({"schedule": "sched.json", "thresholds": {"decay": 100.0, "bracket": 10.0, "ratio": 1.0}}),
    );
    let o = dwt(&["nonselect"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bracket too wide"));
}

#[test]
fn oracle_check_agrees() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "o.json",
        serde_json::json!({"potential": fixture("mixed.json"), "betas": [0.5, 4.0, 30.0], "depth": 8}),
    );
    let o = dwt(&["oracle-check"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["agree"], true);
    assert_eq!(v["spectral"].as_array().unwrap().len(), 3);
}

#[test]
fn subaction_reaches_its_limit() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "s.json", serde_json::json!({"potential": fixture("mixed.json"), "betas": [5.0, 200.0]}));
    let o = dwt(&["subaction"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["distances"]["fixed_point_to_limit"].as_f64().unwrap() < 1e-12);
    let d: Vec<f64> = v["finite_beta"].as_array().unwrap().iter().map(|x| x["distance_to_limit"].as_f64().unwrap()).collect();
    assert!(d[1] < d[0]);
}

#[test]
fn reduce_emits_a_reloadable_potential() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "r.json", serde_json::json!({"potential": fixture("general.json")}));
    let o = dwt(&["reduce"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(dir.path().join("reduced.json"), o.stdout).unwrap();
    let cfg = config(&dir, "v.json", serde_json::json!({"potential": "reduced.json"}));
    let o = dwt(&["validate"], &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(dwt(&["classify"], &missing, &[]).status.code(), Some(3));
    let cfg = config(&dir, "u.json", serde_json::json!({"potential": fixture("golden.json"), "bogus": 1}));
    assert_eq!(dwt(&["classify"], &cfg, &[]).status.code(), Some(1));
    let cfg = config(&dir, "b.json", serde_json::json!({"potential": fixture("golden.json"), "betas": [0.0]}));
    assert_eq!(dwt(&["sweep"], &cfg, &[]).status.code(), Some(1));
    let cfg = config(&dir, "g.json", serde_json::json!({"potential": fixture("golden.json")}));
    assert_eq!(dwt(&["classify", "--format", "csv"], &cfg, &[]).status.code(), Some(1));
    assert_eq!(dwt(&["classify"], &cfg, &[("DWT_THREADS", "zero")]).status.code(), Some(1));
    let out = dir.path().join("no/such/dir/x.json");
    assert_eq!(dwt(&["classify", "--out", out.to_str().unwrap()], &cfg, &[]).status.code(), Some(3));
}

#[test]
fn bundled_configs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let command = path.file_stem().unwrap().to_str().unwrap().to_string();
        let o = dwt(&[&command], &path, &[]);
        let expected = if command == "validate" { 1 } else { 0 };
        assert_eq!(o.status.code(), Some(expected), "{command}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty(), "{command}");
        seen += 1;
    }
    assert_eq!(seen, 10);
}
