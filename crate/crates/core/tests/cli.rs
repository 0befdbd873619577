use std::path::Path;
use std::process::{Command, Output};

fn rtp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtp")).args(args).output().unwrap()
}

fn rtp_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtp")).env("RAYON_NUM_THREADS", threads).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(line: &str, key: &str) -> f64 {
    let start = line.find(&format!("{key}=")).unwrap() + key.len() + 1;
    let rest = &line[start..];
    let end = rest.find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == 'e')).unwrap_or(rest.len());
    rest[..end].parse().unwrap()
}

#[test]
fn death_only_meanfield_matches_closed_form() {
    let o = rtp(&["meanfield", "--preset", "coop", "--alpha", "0", "--p0", "0.8", "--t", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let p = field(&stdout(&o), "p");
    assert!((p - 0.8 * (-1.0f64).exp()).abs() < 1e-7, "{p}");
}

#[test]
fn bivariate_reaches_the_middle_fixed_point() {
    let o = rtp(&["bivariate", "--alpha", "4.5", "--p0", "1/3", "--r0", "5/9", "--t", "40"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    assert!((field(&line, "p") - 1.0 / 3.0).abs() < 1e-6);
    assert!((field(&line, "r") - 0.4226497).abs() < 1e-6);
}

#[test]
fn hlrde_writes_a_cdf_and_reports_moments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mid.csv");
    let o = rtp(&["hlrde", "--alpha", "4.5", "--pool", "10000", "--sweeps", "60", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.starts_with("hlrde mean="));
    assert!((field(&line, "mean") - 1.0 / 3.0).abs() < 0.01);
    assert!((field(&line, "atom0") - 1.0 / 3.0).abs() < 0.02);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("eta,F\n"));
    assert_eq!(csv.lines().count(), 1002);
}

fn files_equal(a: &Path, b: &Path) -> bool {
    std::fs::read(a).unwrap() == std::fs::read(b).unwrap()
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        vec!["tree-estimate", "--p0", "0.5", "--t", "0.4", "--samples", "3000"],
        vec!["uniqueness-scan", "--alpha", "2", "--times", "1,2", "--samples", "500"],
        vec!["particle", "--p0", "1/2", "--t", "1", "--n", "2000"],
    ] {
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        let mut args_a = cmd.clone();
        args_a.extend(["--seed", "3", "--out", a.to_str().unwrap()]);
        let mut args_b = cmd.clone();
        args_b.extend(["--seed", "3", "--out", b.to_str().unwrap()]);
        let oa = rtp_threads(&args_a, "1");
        let ob = rtp_threads(&args_b, "4");
        assert!(oa.status.success() && ob.status.success(), "{}", stderr(&oa));
        assert!(files_equal(&a, &b), "{cmd:?}");
        assert_eq!(stdout(&oa), stdout(&ob));
    }
}

#[test]
fn dumped_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let o = rtp(&[
        "coupled", "--p0", "1/3", "--t", "1", "--n", "1000", "--seed", "11",
        "--out", first.to_str().unwrap(), "--dump-config", cfg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o2 = rtp(&["--config", cfg.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o2.status.success(), "{}", stderr(&o2));
    assert!(files_equal(&first, &second));
    assert!(std::fs::read_to_string(&first).unwrap().starts_with("t_rescaled,p,r\n"));
}

#[test]
fn config_errors_exit_with_two_and_name_the_flag() {
    let o = rtp(&["meanfield", "--p0", "1.5", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--p0"));
    let o = rtp(&["particle", "--p0", "x", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--p0"));
    let o = rtp(&["uniqueness-scan", "--times", "2,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--times"));
}

#[test]
fn runtime_errors_exit_with_one_and_name_the_error() {
    let o = rtp(&["tree-estimate", "--p0", "0.5", "--t", "5", "--samples", "10", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("BudgetExceeded"));
}

#[test]
fn default_seed_is_fixed() {
    let args = ["particle", "--p0", "0.5", "--t", "0.5", "--n", "500"];
    assert_eq!(stdout(&rtp(&args)), stdout(&rtp(&args)));
}
