use varlab_harness::experiments::{find, run_experiment};
use varlab_harness::{ExperimentConfig, ExperimentReport, Format, HarnessError, Status, EXPERIMENTS, FAMILIES};

fn cfg(name: &str) -> ExperimentConfig {
    ExperimentConfig::new(name)
}

#[test]
fn registry_covers_every_family() {
    for fam in FAMILIES {
        assert!(EXPERIMENTS.iter().any(|e| e.family == *fam), "{fam}");
    }
    for name in [
        "variation-oracle", "jump-oracle", "cz-properties", "master-decomposition", "lv-probe", "weak11", "bmo",
        "ergodic-identity", "lambda-j", "elementary-constants", "littlewood-paley", "semigroup-axioms",
        "semigroup-variation", "jump-estimate", "poisson-summation", "lacunary", "cotype-necessity",
    ] {
        assert!(find(name).is_some(), "{name}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.csv"));
        let mut c = cfg("variation-oracle").with("count", 40);
        c.out = Some(path.clone());
        run_experiment(&c).unwrap();
        bodies.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
    let mut other = cfg("variation-oracle").with("count", 40);
    other.seed += 1;
    let a = run_experiment(&other).unwrap().to_csv().unwrap();
    assert_ne!(a.as_bytes(), &bodies[0][..]);
}

#[test]
fn json_mirrors_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg("lambda-j").with("count", 20).with("m", "1,2");
    c.format = Format::Json;
    c.out = Some(dir.path().join("l.json"));
    let report = run_experiment(&c).unwrap();
    let back = ExperimentReport::read(c.out.as_ref().unwrap()).unwrap();
    assert_eq!(back.rows.len(), report.rows.len());
    for (a, b) in back.rows.iter().zip(&report.rows) {
        assert_eq!(a.statistic, b.statistic);
        assert_eq!(a.value, b.value);
        assert_eq!(a.status, b.status);
        assert_eq!(a.params, b.params);
    }
}

#[test]
fn every_row_carries_the_corpus_tuple() {
    let report = run_experiment(&cfg("jump-oracle").with("count", 8)).unwrap();
    for row in &report.rows {
        assert_eq!(row.param("count"), Some("8"));
        assert_eq!(row.param("corpus"), Some("random-gaussian"));
        assert!(row.param("r").is_some() && row.param("q").is_some());
    }
}

#[test]
fn lacunary_rows() {
    let report = run_experiment(&cfg("lacunary").with("i", "1..=30")).unwrap();
    let gaps: Vec<f64> = report.rows_named("gap").map(|r| r.value).collect();
    assert_eq!(gaps.len(), 30);
    assert_eq!(gaps[0], 0.3125);
    // the sequence settles at e^{-1/2} - e^{-1}
    assert!((gaps[29] - ((-0.5f64).exp() - (-1f64).exp())).abs() < 1e-8);
    assert_eq!(report.rows_named("gap_at_1").next().unwrap().status, Status::Pass);
}

#[test]
fn small_master_decomposition_passes() {
    let report = run_experiment(&cfg("master-decomposition").with("count", 3).with("J", 6)).unwrap();
    assert!(report.all_pass());
    assert_eq!(report.rows_named("max_residual").count(), 2);
}

#[test]
fn corpus_kinds_are_selectable() {
    for kind in ["spike", "lacunary", "rademacher-martingale", "random-integer"] {
        let c = cfg("martingale-cotype").with("count", 3).with("corpus", kind).with("r", 2);
        let report = run_experiment(&c).unwrap();
        assert!(report.all_pass(), "{kind}");
        assert!(report.rows.iter().all(|r| r.param("corpus") == Some(kind)));
    }
}

#[test]
fn configuration_errors() {
    assert!(matches!(run_experiment(&cfg("no-such")), Err(HarnessError::UnknownExperiment(_))));
    assert!(matches!(
        run_experiment(&cfg("lacunary").with("ii", 3)),
        Err(HarnessError::UnknownParameters { .. })
    ));
    assert!(matches!(run_experiment(&cfg("lacunary").with("count", 3)), Err(HarnessError::Config(_))));
    assert!(run_experiment(&cfg("master-decomposition").with("q", 2).with("q0", 2)).is_err());
    assert!(run_experiment(&cfg("averages-variation").with("p", 1)).is_err());
    let mut c = cfg("lacunary");
    c.out = Some("/nonexistent-dir/sub/out.csv".into());
    assert!(matches!(run_experiment(&c), Err(HarnessError::Write { .. })));
}
