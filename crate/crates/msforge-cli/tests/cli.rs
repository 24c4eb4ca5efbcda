use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn msforge(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_msforge"));
    cmd.current_dir(dir)
        .args(args)
        .env_remove("MSFORGE_TOL_PERIOD")
        .env_remove("MSFORGE_MESH_RES");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr)
        .unwrap_or_else(|_| panic!("stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn solve_genus(dir: &Path) -> std::path::PathBuf {
    let out = msforge(
        dir,
        &[
            "solve", "--family", "genus", "--gamma", "1", "--out", "g1.json",
        ],
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    dir.join("g1.json")
}

#[test]
fn solve_genus_family() {
    let dir = tempfile::tempdir().unwrap();
    let p = json(&solve_genus(dir.path()));
    assert_eq!(p["family"], "genus_family");
    assert_eq!(p["gamma"], 1);
    assert!(p["c"].as_f64().unwrap() > 0.0);
    assert!(p["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn solve_even_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(
        dir.path(),
        &["solve", "--family", "even", "--k", "2", "--out", "e2.json"],
        &[],
    );
    assert!(out.status.success());
    let p = json(&dir.path().join("e2.json"));
    assert_eq!(p["k"], 2);
    assert!(p["a"].as_f64().unwrap() > 1.0);
    assert!(stdout(&out).contains("even_family"));
}

#[test]
fn odd_k_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(dir.path(), &["solve", "--family", "even", "--k", "3"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["error"]["kind"], "invalid");
    assert_eq!(e["error"]["exit_code"], 2);
    assert!(!dir.path().join("params.json").exists());
}

#[test]
fn period_tolerance_from_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let strict = [("MSFORGE_TOL_PERIOD", "1e-20")];
    let out = msforge(
        dir.path(),
        &["solve", "--family", "genus", "--gamma", "1"],
        &strict,
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"]["kind"], "no_convergence");
    let out = msforge(
        dir.path(),
        &[
            "solve",
            "--family",
            "genus",
            "--gamma",
            "1",
            "--tol-period",
            "1e-8",
        ],
        &strict,
    );
    assert!(out.status.success());
}

#[test]
fn nonpositive_tolerance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(
        dir.path(),
        &[
            "solve",
            "--family",
            "genus",
            "--gamma",
            "1",
            "--tol-period",
            "-1",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_solved_genus_family() {
    let dir = tempfile::tempdir().unwrap();
    let params = solve_genus(dir.path());
    let out = msforge(
        dir.path(),
        &["verify", params.to_str().unwrap(), "--report", "r.json"],
        &[],
    );
    assert!(out.status.success(), "{}", stdout(&out));
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["pass"], true);
    let mut d: Vec<u64> = r["ends"]["ends"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["d"].as_u64().unwrap())
        .collect();
    d.sort();
    assert_eq!(d, [1, 3]);
    let tau = r["total_curvature"]["extrapolated"].as_f64().unwrap();
    assert!((tau / (12.0 * std::f64::consts::PI) - 1.0).abs() < 0.01);
    assert_eq!(r["group_order"], 8);
}

#[test]
fn verify_perturbed_c_fails_periods() {
    let dir = tempfile::tempdir().unwrap();
    let params = solve_genus(dir.path());
    let mut p = json(&params);
    p["c"] = (p["c"].as_f64().unwrap() * 1.1).into();
    std::fs::write(dir.path().join("bad.json"), p.to_string()).unwrap();
    let out = msforge(
        dir.path(),
        &["verify", "bad.json", "--report", "r.json"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["pass"], false);
    assert_eq!(r["checks"]["periods"], false);
    assert_eq!(r["checks"]["jorge_meeks"], true);
}

#[test]
fn verify_catenoid_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(dir.path(), &["verify", "--builtin", "catenoid"], &[]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["pass"], true);
}

#[test]
fn verify_missing_or_corrupt_params() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(dir.path(), &["verify", "nope.json"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "invalid");
    std::fs::write(dir.path().join("junk.json"), "{ not json").unwrap();
    let out = msforge(dir.path(), &["verify", "junk.json"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "json");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let params = solve_genus(dir.path());
    let first = std::fs::read(&params).unwrap();
    solve_genus(dir.path());
    assert_eq!(first, std::fs::read(&params).unwrap());
    for name in ["a.json", "b.json"] {
        let out = msforge(
            dir.path(),
            &["verify", "g1.json", "--report", name, "--seed", "5"],
            &[],
        );
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read(dir.path().join("a.json")).unwrap(),
        std::fs::read(dir.path().join("b.json")).unwrap()
    );
}

#[test]
fn mesh_writes_obj_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let params = solve_genus(dir.path());
    let out = msforge(
        dir.path(),
        &[
            "mesh",
            params.to_str().unwrap(),
            "--out",
            "g1.obj",
            "--res",
            "16",
            "--ply",
            "g1.ply",
        ],
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let obj = std::fs::read_to_string(dir.path().join("g1.obj")).unwrap();
    let meta = json(&dir.path().join("g1.meta.json"));
    let nv = obj.lines().filter(|l| l.starts_with("v ")).count();
    let nf = obj.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!(meta["vertices"].as_u64().unwrap() as usize, nv);
    assert_eq!(meta["faces"].as_u64().unwrap() as usize, nf);
    assert_eq!(meta["deg_g"], 3);
    assert!((meta["tau_over_4pi"].as_f64().unwrap() - 3.0).abs() < 0.03);
    assert!(meta["closure_residual"].as_f64().unwrap() < 1e-8);
    assert!(std::fs::read(dir.path().join("g1.ply"))
        .unwrap()
        .starts_with(b"ply\n"));
    // the parameter file is left alone
    assert_eq!(json(&params)["family"], "genus_family");
}

#[test]
fn mesh_resolution_from_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let env = [("MSFORGE_MESH_RES", "8")];
    let count = |args: &[&str]| {
        let out = msforge(dir.path(), args, &env);
        assert!(out.status.success());
        json(&dir.path().join("cat.meta.json"))["vertices"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(
        count(&["mesh", "--builtin", "catenoid", "--out", "cat.obj"]),
        64
    );
    assert_eq!(
        count(&[
            "mesh",
            "--builtin",
            "catenoid",
            "--out",
            "cat.obj",
            "--res",
            "12"
        ]),
        144
    );
    let out = msforge(
        dir.path(),
        &["mesh", "--builtin", "catenoid"],
        &[("MSFORGE_MESH_RES", "1")],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn torn_mesh_is_refused_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let params = solve_genus(dir.path());
    let mut p = json(&params);
    p["c"] = (p["c"].as_f64().unwrap() * 1.1).into();
    std::fs::write(dir.path().join("bad.json"), p.to_string()).unwrap();
    let out = msforge(
        dir.path(),
        &["mesh", "bad.json", "--out", "bad.obj", "--res", "8"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("torn"));
    assert!(!dir.path().join("bad.obj").exists());
    let out = msforge(
        dir.path(),
        &[
            "mesh", "bad.json", "--out", "bad.obj", "--res", "8", "--force",
        ],
        &[],
    );
    assert!(out.status.success());
}

#[test]
fn classify_gamma_11() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(
        dir.path(),
        &["classify", "--gamma", "11", "--json", "t.json"],
        &[],
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("(2, 3, 3)"));
    let t = json(&dir.path().join("t.json"));
    let table6 = t["tables"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["table"] == 6)
        .unwrap();
    assert!(table6["rows"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["m"] == serde_json::json!([2, 3, 3])));
}

#[test]
fn classify_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(
        dir.path(),
        &["classify", "--gamma", "1", "--ends", "1,3"],
        &[],
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("constructed:genus_family"));
    let out = msforge(
        dir.path(),
        &["classify", "--gamma", "3", "--ends", "2,2"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonexistence_cases() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(dir.path(), &["nonexist", "--case", "genus1_alt"], &[]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("confirmed"));
    let out = msforge(
        dir.path(),
        &["nonexist", "--case", "even_alt_a_neg", "--json", "n.json"],
        &[],
    );
    assert!(out.status.success());
    let r = json(&dir.path().join("n.json"));
    let cov = &r[0]["coverage"];
    assert_eq!(cov["covers_negative_axis"], true);
    assert_eq!(cov["overlap"], serde_json::json!([-1.5, -2.0 / 3.0]));
    let out = msforge(dir.path(), &["nonexist", "--case", "nope"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn weber_genus_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = msforge(
        dir.path(),
        &["weber", "--gamma", "1", "--out", "w.json"],
        &[],
    );
    assert!(out.status.success());
    let p = json(&dir.path().join("w.json"));
    assert_eq!(p["family"], "weber_family");
    assert!(p["residual"].as_f64().unwrap() < 1e-8);
    let out = msforge(dir.path(), &["verify", "w.json", "--report", "r.json"], &[]);
    assert!(out.status.success());
}
