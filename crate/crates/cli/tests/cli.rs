use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk-thermo"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn meta(path: &Path) -> Value {
    let mut name = path.file_name().unwrap().to_os_string();
    name.push(".meta.json");
    json(&path.with_file_name(name))
}

#[test]
fn evolve_zero_steps_writes_one_row_and_sidecar() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["evolve", "--steps", "0"]);
    let path = dir.path().join("trajectory.csv");
    let (header, rows) = csv(&path);
    assert_eq!(
        header.join(","),
        "t,p_left,p_right,re_q,im_q,norm,lambda_plus,lambda_minus,entropy_bits"
    );
    assert_eq!(rows.len(), 1);
    let m = meta(&path);
    assert_eq!(m["command"], "evolve");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"]["init"]["kind"], "localized");
    assert_eq!(m["config"]["steps"], 0);
}

#[test]
fn evolve_localized_tail_interference() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "evolve",
            "--init",
            "localized",
            "--gamma",
            "0",
            "--phi",
            "0",
            "--theta",
            "0.7853981633974483",
            "--steps",
            "5000",
            "--out",
            "walk.csv",
        ],
    );
    let (header, rows) = csv(&dir.path().join("walk.csv"));
    let t = column(&header, &rows, "t");
    let re_q = column(&header, &rows, "re_q");
    let tail: Vec<f64> = t
        .iter()
        .zip(&re_q)
        .filter(|(t, _)| **t >= 4000.0)
        .map(|(_, q)| *q)
        .collect();
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    assert!((mean - 0.1464).abs() < 0.005, "{mean}");
}

#[test]
fn evolve_gaussian_stays_near_equilibrium() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "evolve",
            "--init",
            "gaussian",
            "--sigma0",
            "10",
            "--gamma",
            "1.0471975511965976",
            "--phi",
            "0.9553166181245093",
            "--theta",
            "0.7853981633974483",
            "--steps",
            "1000",
            "--record-every",
            "10",
            "--out",
            "g.csv",
        ],
    );
    let (header, rows) = csv(&dir.path().join("g.csv"));
    assert_eq!(rows.len(), 101);
    let t = column(&header, &rows, "t");
    let re_q = column(&header, &rows, "re_q");
    for (t, q) in t.iter().zip(&re_q).filter(|(t, _)| **t >= 200.0) {
        assert!((q - 0.25).abs() < 0.01, "t={t}: {q}");
    }
}

#[test]
fn evolve_json_and_init_json() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "evolve",
            "--init-json",
            r#"{"kind":"localized","gamma":0,"phi":0}"#,
            "--steps",
            "2",
            "--format",
            "json",
        ],
    );
    let rows = json(&dir.path().join("trajectory.json"));
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert!((rows[2]["re_q"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn small_gaussian_width_warns() {
    let dir = TempDir::new().unwrap();
    let out = run(
        dir.path(),
        &[
            "evolve", "--init", "gaussian", "--sigma0", "3", "--gamma", "1.2", "--steps", "5",
        ],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(
        meta(&dir.path().join("trajectory.csv"))["config"]["regime_warning"],
        true
    );
}

#[test]
fn thermo_examples() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["thermo", "--chi", "0.0428932", "--out", "a.json"]);
    let t = json(&d.join("a.json"))["temperature"].as_f64().unwrap();
    assert!((t - 2.26918).abs() < 1e-5);

    ok(
        d,
        &[
            "thermo",
            "--localized",
            "--gamma",
            "0.7853981633974483",
            "--phi",
            "0",
            "--out",
            "b.json",
        ],
    );
    let r = json(&d.join("b.json"))["temperature_ratio"]
        .as_f64()
        .unwrap();
    assert!((r - 0.656539).abs() < 1e-6);

    ok(
        d,
        &[
            "thermo",
            "--distributed",
            "--gamma",
            "1.0471975511965976",
            "--theta",
            "0.7853981633974483",
            "--out",
            "c.json",
        ],
    );
    let beta = json(&d.join("c.json"))["beta"].as_f64().unwrap();
    assert!((beta - 0.881374).abs() < 1e-6);

    ok(d, &["thermo", "--chi", "0", "--out", "z.json"]);
    let z = json(&d.join("z.json"));
    assert_eq!(z["temperature"], "inf");
    assert_eq!(z["helmholtz"], "-inf");
}

#[test]
fn thermo_sweep_has_normalized_columns() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["thermo", "--sweep", "9"]);
    let (header, rows) = csv(&dir.path().join("thermo_sweep.csv"));
    assert_eq!(rows.len(), 9);
    let beta = column(&header, &rows, "beta");
    let norm = column(&header, &rows, "beta_over_log2");
    for (b, n) in beta.iter().zip(&norm) {
        assert!((b / std::f64::consts::LN_2 - n).abs() < 1e-14);
    }
    let s = column(&header, &rows, "entropy_bits");
    assert!(s.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn isotherm_examples() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "isotherms",
            "--mode",
            "localized",
            "--levels",
            "1.0",
            "--samples",
            "16",
        ],
    );
    let (header, rows) = csv(&d.join("isotherms.csv"));
    assert_eq!(header.join(","), "t_ratio_or_T,branch_id,x,y");
    let branches = column(&header, &rows, "branch_id");
    for b in 0..5 {
        assert_eq!(branches.iter().filter(|&&x| x == b as f64).count(), 16);
    }

    ok(
        d,
        &[
            "--jobs",
            "2",
            "isotherms",
            "--mode",
            "distributed",
            "--levels",
            "0.5,1,2,5",
            "--samples",
            "32",
            "--out",
            "dist.csv",
        ],
    );
    let (header, rows) = csv(&d.join("dist.csv"));
    let levels = column(&header, &rows, "t_ratio_or_T");
    let branches = column(&header, &rows, "branch_id");
    assert_eq!(rows.len(), 4 * 2 * 32);
    // Merge order follows the requested level order.
    let order: Vec<f64> = levels.iter().step_by(64).cloned().collect();
    assert_eq!(order, vec![0.5, 1.0, 2.0, 5.0]);
    assert!(branches.iter().all(|&b| b == 0.0 || b == 1.0));
}

#[test]
fn transient_writes_envelope_and_fit() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "transient",
            "--gamma",
            "0.7853981633974483",
            "--phi",
            "0.39269908169872414",
            "--steps",
            "4000",
        ],
    );
    let (header, rows) = csv(&dir.path().join("envelope.csv"));
    assert_eq!(header.join(","), "branch,t,value");
    assert!(rows.iter().any(|r| r[0] == "upper") && rows.iter().any(|r| r[0] == "lower"));
    let fit = json(&dir.path().join("envelope.fit.json"));
    for key in [
        "exponent_c",
        "amplitude_K",
        "residual_rms",
        "window",
        "n_peaks",
    ] {
        assert!(fit.get(key).is_some(), "missing {key}");
    }
    let c = fit["exponent_c"].as_f64().unwrap();
    assert!((c - 0.486).abs() < 0.1, "{c}");
    assert_eq!(fit["negligible_transient"], false);
    let outputs = meta(&dir.path().join("envelope.csv"))["outputs"].clone();
    assert_eq!(outputs.as_array().unwrap().len(), 2);
}

#[test]
fn gaussian_transient_is_negligible() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "transient",
            "--init",
            "gaussian",
            "--sigma0",
            "10",
            "--gamma",
            "1.0471975511965976",
            "--steps",
            "3000",
            "--out",
            "g.csv",
        ],
    );
    let fit = json(&dir.path().join("g.fit.json"));
    assert_eq!(fit["negligible_transient"], true);
    assert!(fit["amplitude_K"].as_f64().unwrap() < 0.01);
}

#[test]
fn transient_isotherm_sweep() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "transient",
            "--isotherm-ratio",
            "1.1",
            "--points",
            "3",
            "--steps",
            "2000",
        ],
    );
    let (header, rows) = csv(&dir.path().join("exponents.csv"));
    assert_eq!(rows.len(), 3);
    let chi = column(&header, &rows, "chi");
    assert!(chi.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12));
}

#[test]
fn master_examples() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "master",
            "-K",
            "0",
            "-d",
            "0.1",
            "--wa",
            "0.2",
            "--wb",
            "0.2",
            "--lambda-plus-inf",
            "0.5",
            "--t1",
            "20",
            "--out",
            "m.csv",
        ],
    );
    let (header, rows) = csv(&d.join("m.csv"));
    let err = column(&header, &rows, "abs_err");
    assert!(err.iter().cloned().fold(0.0, f64::max) < 1e-8);

    let out = run(
        d,
        &[
            "master",
            "--wa",
            "0.2",
            "--wb",
            "0.2",
            "--lambda-plus-inf",
            "0.6",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("detailed balance"));

    ok(d, &["master"]);
    let (header, _) = csv(&d.join("master.csv"));
    assert_eq!(
        header.join(","),
        "t,lambda_plus_numeric,lambda_plus_closed,abs_err"
    );
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for name in ["a.csv", "b.csv"] {
        ok(
            d,
            &[
                "evolve", "--gamma", "1", "--phi", "2", "--steps", "300", "--out", name,
            ],
        );
    }
    let read = |n: &str| std::fs::read(d.join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["thermo", "--chi", "0.3"]).status.code(), Some(2));
    assert_eq!(run(d, &["evolve", "--theta", "2"]).status.code(), Some(2));
    assert_eq!(
        run(d, &["isotherms", "--mode", "localized", "--levels", "0.6"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(d, &["evolve", "--steps", "3000000"]).status.code(),
        Some(3)
    );
    let blocker: PathBuf = d.join("file");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("out.csv");
    assert_eq!(
        run(
            d,
            &["evolve", "--steps", "1", "--out", target.to_str().unwrap()]
        )
        .status
        .code(),
        Some(4)
    );
}
