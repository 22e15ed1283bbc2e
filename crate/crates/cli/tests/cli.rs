use std::path::Path;
use std::process::{Command, Output};

fn semrelay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semrelay"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Value after `key` on its own line of the solve/oracle report.
fn field(text: &str, key: &str) -> Vec<f64> {
    let line = text
        .lines()
        .find(|l| l.starts_with(key))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"));
    line[key.len()..]
        .split_whitespace()
        .filter_map(|t| t.parse().ok())
        .collect()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("params.cfg");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_defaults_converges() {
    let o = semrelay(&["solve"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("status      converged"));
    assert!(field(&text, "zeta")[0] <= 1e-8);
    let d = field(&text, "d_br d_ru");
    assert!((d[0] + d[1] - 100.0).abs() < 1e-6);
}

#[test]
fn bandwidth_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "W = 5e6\n");
    let o = semrelay(&["solve", "--config", &cfg, "--W", "2e6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "W")[0], 2e6);
    let o = semrelay(&["solve", "--config", &cfg]);
    assert_eq!(field(&stdout(&o), "W")[0], 5e6);
}

#[test]
fn infeasible_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "# almost the top of the curve\neps_bar = 0.936499\nP_b = 1e-9\n",
    );
    let o = semrelay(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("infeasible"));
}

#[test]
fn iteration_cap_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "max_outer = 3\n");
    let o = semrelay(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("iteration-cap"));
}

#[test]
fn invalid_parameter_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "beta = 1.5\n");
    let o = semrelay(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error:") && err.contains("beta"), "{err}");
}

#[test]
fn sweep_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = semrelay(&[
            "sweep",
            "--w-min",
            "1e5",
            "--w-max",
            "1e7",
            "--points",
            "3",
            "--grid",
            "101",
            "--line-grid",
            "201",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        files.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files.remove(0)).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("W,eta_penalty,eta_oracle,"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn oracle_reports_a_grid_point() {
    let o = semrelay(&["oracle", "--W", "1e6", "--grid", "101"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let d = field(&text, "d_br d_ru");
    // grid step is 1 m
    assert_eq!(d[0], d[0].round());
    assert!(field(&text, "eta")[0] >= field(&text, "df eta")[0]);
}

#[test]
fn compare_lists_five_schemes() {
    let o = semrelay(&[
        "compare",
        "--W",
        "1e6",
        "--grid",
        "201",
        "--line-grid",
        "401",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<(&str, f64, f64)> = text
        .lines()
        .skip(2)
        .map(|l| {
            let t: Vec<&str> = l.split_whitespace().collect();
            (t[0], t[1].parse().unwrap(), t[4].parse().unwrap())
        })
        .collect();
    let names: Vec<&str> = rows.iter().map(|r| r.0).collect();
    assert_eq!(
        names,
        ["penalty", "oracle", "equal_bw", "fixed_place", "df"]
    );
    let oracle = rows[1].1;
    // the continuous solution may edge past the grid
    assert!(rows[0].1 <= oracle * 1.005);
    for r in &rows[2..4] {
        assert!(r.1 <= oracle);
    }
    assert!((rows[4].2 - 0.5).abs() <= 0.005);
}
