//! End-to-end checks of the binary: exit codes, format equivalence,
//! determinism, and spot values.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coupled-vdp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("cvdp-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(run(&["hopf", "--alpha", "1.0"]).status.code(), Some(0));
    // config errors: 2
    assert_eq!(
        run(&["hopf", "--alpha", "1.0", "--eps", "-0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["simulate", "--system", "slow", "--alpha", "1", "--T", "2", "--beta", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["curves", "--format", "text"]).status.code(),
        Some(2),
        "text format is reserved for table1"
    );
    assert_eq!(run(&["simulate", "--system", "slow"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    // numerical failures: 3
    assert_eq!(run(&["hopf", "--alpha", "0.2"]).status.code(), Some(3));
    let degenerate = run(&[
        "hopf",
        "--alpha",
        "0.4714045207910317",
        "--eps",
        "0.1",
        "--n-terms",
        "1",
    ]);
    assert_eq!(degenerate.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&degenerate.stderr).contains("zero-eigenvalue"));
}

#[test]
fn diagnostics_name_the_offending_field() {
    let out = run(&["fig1", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--tol"));
    let out = run(&["table1", "--grid", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--grid"));
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let csv = stdout_of(&["hopf", "--alpha", "0.9", "--eps", "0.4"]);
    let json = stdout_of(&["hopf", "--alpha", "0.9", "--eps", "0.4", "--format", "json"]);
    let line = csv.lines().nth(1).unwrap();
    let cells: Vec<&str> = line.split(',').collect();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    let row = &parsed[0];
    assert_eq!(cells[0].parse::<f64>().unwrap(), row["alpha"].as_f64().unwrap());
    assert_eq!(cells[3].parse::<f64>().unwrap(), row["T_series"].as_f64().unwrap());
    assert_eq!(cells[5].parse::<f64>().unwrap(), row["T_newton"].as_f64().unwrap());
    assert_eq!(cells[7].parse::<f64>().unwrap(), row["residual"].as_f64().unwrap());
}

#[test]
fn curve_spot_values() {
    // intersection point: the zero-trace and saddle-node curves meet
    let csv = stdout_of(&["curves", "--alpha", "0.4714045207910317"]);
    let cells: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let hopf: f64 = cells[1].parse().unwrap();
    let sn: f64 = cells[2].parse().unwrap();
    let three_quarter_pi = 3.0 * std::f64::consts::PI / 4.0;
    assert!((hopf - three_quarter_pi).abs() < 1e-9);
    assert!((sn - three_quarter_pi).abs() < 1e-6);
    assert_eq!(cells[3], "", "mode birth needs alpha >= 1");

    let csv = stdout_of(&["curves", "--alpha", "0.5"]);
    let cells: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let sn: f64 = cells[2].parse().unwrap();
    assert!((sn - std::f64::consts::PI).abs() < 1e-6);

    let csv = stdout_of(&["curves", "--alpha", "1"]);
    let cells: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let mb: f64 = cells[3].parse().unwrap();
    assert!((mb - std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(cells[2], "", "saddle-node ends at alpha = 1/2");
}

#[test]
fn inphase_grid_and_boundary_flag() {
    // uncoupled: R = 2 along the whole delay grid
    let csv = stdout_of(&[
        "inphase", "--alpha", "0", "--T-min", "0", "--T-max", "3", "--T-steps", "7",
    ]);
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[3], "true");
        assert_eq!(cells[4].parse::<f64>().unwrap(), 2.0);
    }
    // mode-birth boundary row is flagged, not fatal
    let csv = stdout_of(&[
        "inphase", "--alpha", "2", "--T", "2.0943951023931953", "--eps", "0.1",
    ]);
    let cells: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(cells[3], "false");
    assert_eq!(cells[4], "");
    assert_eq!(cells[5], "");
}

#[test]
fn fig1_columns_collapse_at_zero_eps() {
    let csv = stdout_of(&[
        "fig1", "--eps", "0", "--alpha-min", "0.8", "--alpha-max", "1.0", "--alpha-steps", "3",
        "--tol", "1e-3",
    ]);
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let t1: f64 = cells[1].parse().unwrap();
        let t2: f64 = cells[2].parse().unwrap();
        let t3: f64 = cells[3].parse().unwrap();
        let sim: f64 = cells[4].parse().unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t2, t3);
        assert!((sim - t1).abs() < 2e-3, "sim={sim} t1={t1}");
        assert_eq!(cells[5], "ok");
    }
}

#[test]
fn fig1_full_view_has_error_columns() {
    let csv = stdout_of(&[
        "fig1", "--eps", "0.3", "--alpha", "1.0", "--full", "--tol", "1e-3",
    ]);
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "alpha,eps,T_sim,T_s1,T_s2,T_s3,T_newton,abs1,abs2,abs3,rel1,rel2,rel3,pct1,pct2,pct3,status"
    );
    let cells: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let pct1: f64 = cells[13].parse().unwrap();
    assert!((pct1 - 8.49).abs() < 0.5, "pct1 = {pct1}");
    assert_eq!(cells[16], "ok");
}

#[test]
fn outputs_are_deterministic() {
    let args = [
        "fig1", "--eps", "0.2", "--alpha-min", "0.9", "--alpha-max", "1.0", "--alpha-steps", "2",
        "--tol", "1e-3",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
    let sim_args = [
        "simulate", "--system", "slow", "--alpha", "1", "--T", "1.7", "--eps", "0.3", "--seed",
        "7", "--window", "80",
    ];
    let a = stdout_of(&sim_args);
    assert_eq!(a, stdout_of(&sim_args));
    let mut other = sim_args;
    other[11] = "8";
    assert_ne!(a, stdout_of(&other), "different seed, different history");
}

#[test]
fn simulate_reports_blowup_time() {
    // far beyond every stability boundary: the slow flow explodes
    let csv = stdout_of(&[
        "simulate", "--system", "slow", "--alpha", "1", "--T", "2.9", "--eps", "0", "--window",
        "4000",
    ]);
    assert!(csv.contains("# rate=inf"), "{}", csv.lines().next().unwrap());
    assert!(csv.contains("# blowup_time="));
}

#[test]
fn simulate_file_output(){
    let path = tmp_path("traj.csv");
    let out = run(&[
        "simulate", "--system", "slow", "--alpha", "0.9", "--T", "1.9", "--eps", "0.2",
        "--window", "60", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# rate="));
    assert!(text.contains("t,A,B"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn table1_text_layout_smoke() {
    let text = stdout_of(&["table1", "--grid", "3", "--format", "text", "--tol", "1e-3"]);
    assert!(text.contains("percent error"));
    assert!(text.contains("eps=0.5 n=3"));
    assert_eq!(text.lines().count(), 4);
}
