use std::fs;
use std::process::{Command, Output};

fn affmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affmax")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_ten_dimensional_instance() {
    let o = affmax(&["verify", "--theorem", "9.1", "--N", "10", "--variant", "tw-paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).lines().count() > 100);
}

#[test]
fn verify_full_product() {
    let o = affmax(&["verify", "--theorem", "10.2", "--N", "3", "--theta", "0.6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn out_of_range_theta_is_a_usage_error() {
    let o = affmax(&["verify", "--theorem", "8.1", "--theta", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("θ must lie in (0,1/2) per Theorem 8.1"), "{}", stderr(&o));
}

#[test]
fn unparsable_flags_are_usage_errors() {
    assert_eq!(affmax(&["verify", "--theorem", "7.3"]).status.code(), Some(2));
    assert_eq!(affmax(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn impossible_tolerance_fails_the_gate() {
    let o = affmax(&["verify", "--theorem", "8.1", "--N", "3", "--theta", "0.3", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn scan_rows() {
    let o = affmax(&["scan", "--theorem", "10.1", "--N", "4", "--theta-range", "0.5:0.75:0.01"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r.ends_with(",true")));

    let o = affmax(&["scan", "--theorem", "9.1", "--N", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 3);

    let o = affmax(&["scan", "--theorem", "8.1", "--N", "2", "--theta-range", "0.05:0.45:0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for row in out.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let theta: f64 = cols[2].parse().unwrap();
        let exponent: f64 = cols[4].parse().unwrap();
        assert!((exponent - (2.0 - 1.0 / theta)).abs() < 1e-9, "{row}");
    }
}

#[test]
fn solve_alpha_closed_form() {
    let o = affmax(&["solve-alpha", "--variant", "full", "--theta", "0.6", "--N", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    for a in row[3].split(';') {
        assert!((a.parse::<f64>().unwrap() - 1.0).abs() <= 1e-10, "{row:?}");
    }
}

#[test]
fn inequality_lemmas_pass() {
    let o = affmax(&["inequality", "lemma42", "--corpus", "normalized", "--grid", "32,64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = affmax(&["inequality", "lemma43", "--corpus", "normalized", "--grid", "32,64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn measure_doubling_of_quadratic() {
    let spec = r#"{"family":"quadratic","q":[[2.0,0.0],[0.0,2.0]],"b":[0.0,0.0],"c":0.0}"#;
    let o = affmax(&["measure", "doubling", "--spec", spec, "--x0", "0,0", "--grid", "48"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for row in out.lines().skip(1) {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[1] - cols[2]).abs() <= 1e-6 * cols[2], "{row}");
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command":"verify","theorem":"8.1","N":3,"theta":0.3,"samples":5,"seed":4}"#).unwrap();
    let path = cfg.to_str().unwrap();
    let o = affmax(&["verify", "--config", path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = affmax(&["verify", "--config", path, "--theta", "0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("per Theorem 8.1"));

    let out = dir.path().join("res.csv");
    let o = affmax(&["verify", "--config", path, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 6);

    fs::write(&cfg, r#"{"command":"scan","theorem":"8.1"}"#).unwrap();
    assert_eq!(affmax(&["verify", "--config", path]).status.code(), Some(2));
    fs::write(&cfg, r#"{"bogus":1}"#).unwrap();
    assert_eq!(affmax(&["verify", "--config", path]).status.code(), Some(2));
}

#[test]
fn missing_config_is_a_usage_error() {
    let o = affmax(&["verify", "--config", "/nonexistent/run.json", "--theorem", "8.1", "--theta", "0.3"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
