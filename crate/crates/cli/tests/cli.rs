use std::path::Path;
use std::process::{Command, Output};

const DISK: &str = r#"{"domain": [{"circle": {"center": [0, 0], "radius": 1}}]"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nvneumann"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_value(csv: &str, row: usize, col: usize) -> f64 {
    csv.lines()
        .nth(row + 1)
        .unwrap()
        .split(',')
        .nth(col)
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn solve_disk_poisson() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("probes.csv");
    let cfg = write_config(
        dir.path(),
        "disk.json",
        &format!(
            r#"{DISK}, "f": {{"f0": "1"}}, "g": {{"mu0": "0.5"}},
               "outputs": {{"probes": [[0, 0], [0.5, 0.1]], "csv": {:?}}}}}"#,
            csv.to_str().unwrap()
        ),
    );
    let out = bin().arg("solve").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = stdout(&out);
    assert!(report.contains("compatibility") && report.contains("converged   yes"));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!((csv_value(&table, 0, 2) + 0.125).abs() < 1e-3);
}

#[test]
fn solve_refuses_incompatible_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        &format!(r#"{DISK}, "f": {{"f0": "1"}}, "g": {{"mu0": "1"}}}}"#),
    );
    let out = bin().arg("solve").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("defect +3.14159"), "{}", stdout(&out));
    let out = bin().arg("check-compat").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_config_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "broken.json", "{\"domain\": [\n  {\"circle\": }");
    let out = bin().arg("solve").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    let cfg = write_config(dir.path(), "unknown.json", &format!(r#"{DISK}, "extra": 1}}"#));
    assert_eq!(
        bin().arg("check-compat").arg(&cfg).output().unwrap().status.code(),
        Some(2)
    );
    let cfg = write_config(
        dir.path(),
        "expr.json",
        &format!(r#"{DISK}, "g": {{"mu0": "cos(theta"}}}}"#),
    );
    let out = bin().arg("solve").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position"));
}

#[test]
fn verify_filter_and_fault() {
    let out = bin().args(["verify", "--filter", "steklov"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    let rows: Vec<_> = s.lines().filter(|l| l.ends_with(" ok")).collect();
    assert!(rows.len() >= 10 && rows.iter().all(|l| l.starts_with("steklov/")));
    let out = bin()
        .args(["verify", "--filter", "jump", "--inject-fault", "flip-kprime"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("failed: jump/gauss-circle"));
}

#[test]
fn verify_full_suite() {
    let out = bin().arg("verify").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let rows = stdout(&out).lines().filter(|l| l.ends_with(" ok")).count();
    assert!(rows >= 40, "{rows} checks");
}

#[test]
fn converge_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "disk.json",
        &format!(r#"{DISK}, "f": {{"f0": "1"}}, "g": {{"mu0": "0.5"}}, "oracle": {{"u": "r^2/4"}}}}"#),
    );
    let out = bin()
        .args(["converge"])
        .arg(&cfg)
        .args(["--sweep", "N=64,128,256"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let csv = stdout(&out);
    assert!(csv.starts_with("N,max_probe_error,residual\n"));
    assert!(csv_value(&csv, 2, 1) <= 1e-3);

    let cfg = write_config(
        dir.path(),
        "dual.json",
        &format!(r#"{DISK}, "g": {{"mu1": "cos(theta)"}}, "oracle": {{"u": "x"}}}}"#),
    );
    let out = bin()
        .args(["converge"])
        .arg(&cfg)
        .args(["--sweep", "K=4,8,16"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(csv_value(&stdout(&out), 1, 1) <= 1e-4);

    let cfg = write_config(dir.path(), "plain.json", &format!(r#"{DISK}}}"#));
    let out = bin()
        .args(["converge"])
        .arg(&cfg)
        .args(["--sweep", "N=64"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn solve_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let csv = dir.path().join(name);
        let cfg = write_config(
            dir.path(),
            &format!("{name}.json"),
            &format!(
                r#"{{"domain": [{{"ellipse": {{"center": [0, 0], "a": 1.5, "b": 1}}}}],
                   "f": {{"f0": "x", "f1": "y"}}, "g": {{"mu0": "cos(theta)", "mu1": "sin(2*theta)"}},
                   "discretization": {{"n": 128, "k": 8}},
                   "outputs": {{"csv": {:?}}}}}"#,
                csv.to_str().unwrap()
            ),
        );
        let out = bin().args(["--threads", threads, "solve"]).arg(&cfg).output().unwrap();
        (out.status.code(), std::fs::read(&csv).unwrap_or_default())
    };
    let (c1, a) = run("1", "a.csv");
    let (c2, b) = run("4", "b.csv");
    assert_eq!((c1, c2), (Some(0), Some(0)));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}
