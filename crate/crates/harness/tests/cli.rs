use std::path::Path;
use std::process::{Command, Output};

fn varlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_shows_families() {
    let o = varlab(&["list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for fam in ["variation", "martingale", "diffavg", "cz", "ergodic", "semigroup", "cotype"] {
        assert!(s.lines().any(|l| l.starts_with(&format!("{fam}:"))), "{fam}");
    }
}

#[test]
fn passing_run_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = varlab(&["variation", "--experiment", "variation-oracle", "--seed", "3", "--out", out.to_str().unwrap(), "count=12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let body = std::fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("experiment,seed,version,"));
    assert!(body.lines().nth(1).unwrap().starts_with("variation-oracle,3,"));
    let o = varlab(&["report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 fail"));
}

#[test]
fn failing_contract_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lac.json");
    let o = varlab(&["semigroup", "--experiment", "lacunary", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL max_distance_to_exp1_minus_exp2"));
    let o = varlab(&["report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn whole_family_writes_one_file_per_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let o = varlab(&["variation", "--out", dir.path().to_str().unwrap(), "count=5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for name in ["variation-oracle", "jump-oracle"] {
        assert!(dir.path().join(format!("{name}.csv")).exists());
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    std::fs::write(&cfg, "# Poisson residuals\nexperiment = poisson-summation\nN = 10, 100\nseries_t = 0.5\n").unwrap();
    let out = dir.path().join("p.csv");
    let o = varlab(&["semigroup", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "x=0.1"]);
    assert_eq!(o.status.code(), Some(1), "the residual at N = 100 is above 1e-3");
    let body = std::fs::read_to_string(Path::new(&out)).unwrap();
    assert!(body.contains(",0.1,"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(varlab(&["semigroup", "--experiment", "nope"]).status.code(), Some(2));
    assert_eq!(varlab(&["semigroup", "--experiment", "variation-oracle"]).status.code(), Some(2));
    assert_eq!(varlab(&["semigroup", "--experiment", "lacunary", "bogus=1"]).status.code(), Some(2));
    assert_eq!(varlab(&["report", "/nonexistent/file.csv"]).status.code(), Some(2));
}
