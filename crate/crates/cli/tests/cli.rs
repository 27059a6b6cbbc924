use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "scheme,alpha,eps,dt,nx,nv,vmax,error,slope_or_order,walltime_s";

fn apkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apkin")).args(args).output().expect("binary runs")
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn run_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = apkin(&["run", "--scheme", "ads", "--dt", "0.001", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "ads");
    let err: f64 = rows[0][7].parse().unwrap();
    assert!(err > 0.0 && err < 5e-3);
}

#[test]
fn sweep_rows_follow_the_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = apkin(&["sweep-eps", "--scheme", "isa", "--eps", "0.5,0.25,0.125", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let eps: Vec<f64> = read_rows(&out).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(eps, vec![0.5, 0.25, 0.125]);
}

#[test]
fn reruns_differ_only_in_walltime() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = apkin(&["sweep-dt", "--scheme", "dsa", "--eps", "0.1", "--dt", "0.01,0.005,0.0025", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let strip = |rows: Vec<Vec<String>>| rows.into_iter().map(|mut r| { r.pop(); r }).collect::<Vec<_>>();
    assert_eq!(strip(read_rows(&a)), strip(read_rows(&b)));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "scheme = \"isd\"\neps = 0.5\ntfinal = 0.01\nnx = 16\n").unwrap();
    let out = dir.path().join("o.csv");
    let o = apkin(&["run", "--config", cfg.to_str().unwrap(), "--eps", "0.25", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let row = &read_rows(&out)[0];
    assert_eq!((row[0].as_str(), row[2].as_str(), row[4].as_str()), ("isd", "0.25", "16"));
}

#[test]
fn verify_constants_table() {
    let o = apkin(&["verify-constants", "--alpha", "1.5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[2] - 1.6813).abs() < 1e-3);
    assert!(row[7] < 1e-6);
}

#[test]
fn bad_input_is_rejected() {
    assert!(!apkin(&["run", "--scheme", "nope"]).status.success());
    assert!(!apkin(&["run", "--scheme", "isa", "--equilibrium", "gaussian"]).status.success());
    assert!(!apkin(&["run", "--scheme", "isa", "--dt", "0.003"]).status.success());
    assert!(!apkin(&["run", "--scheme", "mmsa", "--eps", "1", "--dt", "0.01", "--cfl", "error"]).status.success());
}
