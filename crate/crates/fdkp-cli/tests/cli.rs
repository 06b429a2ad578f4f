use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fdkp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdkp"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FDKP_OUT")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> String {
    fs::read_to_string(dir.join("manifest.txt")).unwrap()
}

#[test]
fn dispersion_writes_curve_and_marker() {
    let t = tempfile::tempdir().unwrap();
    let o = fdkp(&["dispersion", "--beta", "0.2", "--out", "d"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(t.path().join("d/dispersion.csv")).unwrap();
    let (rows, (w0, c0)) = fdkp::experiments::parse_dispersion_csv(&text).unwrap();
    assert_eq!(rows.len(), 241);
    assert!((w0 - 1.8665694277372067).abs() < 1e-12);
    assert!((c0 - 0.9309064847177756).abs() < 1e-14);
    let m = manifest(&t.path().join("d"));
    assert!(m.contains("command = dispersion") && m.contains("beta = 0.2"));
}

#[test]
fn solve_ds_writes_ground_state() {
    let t = tempfile::tempdir().unwrap();
    let o = fdkp(&["solve-ds", "--beta", "0.2", "--n", "128", "--out", "g"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g = t.path().join("g");
    let f = fdkp::io::read_field(&g.join("zeta0.fdkp1"), None).unwrap();
    assert_eq!((f.grid.nx, f.grid.ny), (128, 128));
    let m = manifest(&g);
    assert!(m.contains("tau0 = 0.0187753879886"), "{m}");
    assert!(m.contains("converged = true"));
}

#[test]
fn config_file_is_applied_and_flags_win() {
    let t = tempfile::tempdir().unwrap();
    fs::write(
        t.path().join("run.cfg"),
        "# envelope grid\nn = 32\nbeta = 0.25\nseed = 4\ninit = random\n",
    )
    .unwrap();
    let o = fdkp(
        &["solve-ds", "--config", "run.cfg", "--beta", "0.2", "--out", "g"],
        t.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = manifest(&t.path().join("g"));
    for line in ["beta = 0.2\n", "ds_nx = 32\n", "seed = 4\n", "init = random\n"] {
        assert!(m.contains(line), "{line:?} not in {m}");
    }
}

#[test]
fn invalid_configuration_exits_with_two() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("bad.cfg"), "betta = 0.2\n").unwrap();
    let cases: [&[&str]; 6] = [
        &["sweep", "--config", "bad.cfg"],
        &["sweep", "--config", "missing.cfg"],
        &["sweep", "--eps", "0.1,0.2"],
        &["solve-ds", "--n", "48"],
        &["solve-fdkp", "--eps", "0.2,0.1"],
        &["solve-ds", "--picard", "fast"],
    ];
    for args in cases {
        let o = fdkp(args, t.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(fdkp(&["frobnicate"], t.path()).status.code(), Some(2));
    assert!(stderr(&fdkp(&["sweep", "--config", "bad.cfg"], t.path())).contains("betta"));
}

#[test]
fn solver_failure_names_the_stage() {
    let t = tempfile::tempdir().unwrap();
    let o = fdkp(&["solve-fdkp", "--eps", "0.1", "--n", "64", "--out", "f"], t.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("stage minimize T_eps"), "{}", stderr(&o));
    assert!(manifest(&t.path().join("f")).contains("fdkp_grid = "));
}

#[test]
fn lift_without_descent_polishes() {
    let t = tempfile::tempdir().unwrap();
    let o = fdkp(
        &["solve-fdkp", "--eps", "0.1", "--n", "64", "--skip-descent", "--out", "f"],
        t.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let f = t.path().join("f");
    let json = fs::read_to_string(f.join("lift/reduction.json")).unwrap();
    assert!(json.contains("contraction_ratio"));
    let u = fdkp::io::read_field(&f.join("u.fdkp1"), None).unwrap();
    assert!(u.real);
    let m = manifest(&f);
    let res: f64 = m
        .lines()
        .find_map(|l| l.strip_prefix("residual = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(res < 1e-10);
}

#[test]
fn sweep_reports_failed_rows_and_still_exports() {
    let t = tempfile::tempdir().unwrap();
    let args = ["sweep", "--eps", "0.2", "--n", "64", "--out", "s"];
    let o = fdkp(&args, t.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("eps 0.2 failed at stage"));
    let s = t.path().join("s");
    let csv = fs::read(s.join("sweep.csv")).unwrap();
    assert!(csv.starts_with(fdkp::experiments::SWEEP_HEADER.as_bytes()));
    let m = manifest(&s);
    assert!(m.contains("failed 0.2: stage = "));
    assert!(m.contains("command = sweep") && m.contains("jobs = 1"));
    fdkp(&["sweep", "--eps", "0.2", "--n", "64", "--out", "s2", "--jobs", "2"], t.path());
    assert_eq!(csv, fs::read(t.path().join("s2/sweep.csv")).unwrap());
    assert_eq!(
        fs::read(s.join("zeta0.fdkp1")).unwrap(),
        fs::read(t.path().join("s2/zeta0.fdkp1")).unwrap()
    );
}

#[test]
fn check_passes() {
    let t = tempfile::tempdir().unwrap();
    let o = fdkp(&["check", "--out", "c"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(t.path().join("c/check.txt")).unwrap();
    assert!(text.lines().count() >= 10);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn output_root_comes_from_the_environment() {
    let t = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fdkp"))
        .args(["dispersion", "--samples", "11"])
        .current_dir(t.path())
        .env("FDKP_OUT", t.path().join("root"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(t.path().join("root/dispersion/dispersion.csv").exists());
    let o = fdkp(&["dispersion", "--samples", "11"], t.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(t.path().join("fdkp-out/dispersion/manifest.txt").exists());
}

#[test]
fn help_exits_cleanly() {
    let t = tempfile::tempdir().unwrap();
    let o = fdkp(&["--help"], t.path());
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["dispersion", "solve-ds", "solve-fdkp", "sweep", "check"] {
        assert!(text.contains(sub));
    }
}
