use matconf::config::{Cell, ExperimentConfig, Method};
use matconf::harness::{check_cell, run_cell, run_experiment, run_replication, MAX_FAILURES};
use matconf::records::{read_records, summarize, write_records, Record};
use matconf_core::conformal::Interval;
use matconf_core::simgen::Graphon;

fn config(extra: &str) -> ExperimentConfig {
    let text = format!(
        r#"
        graphons = ["f1"]
        n_values = [12]
        xi_targets = [0.3]
        replications = 4
        method = "alg1"
        master_seed = 9
        output = "records.csv"
        {extra}
    "#
    );
    ExperimentConfig::from_toml_str(&text).unwrap()
}

#[test]
fn smallest_run_gives_one_record() {
    let cfg = ExperimentConfig {
        replications: 1,
        ..config("iter_max = 1")
    };
    let recs = run_experiment(&cfg, |_, _, _, _| {}).unwrap();
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert!(r.error.is_none());
    assert_eq!(
        (r.graphon, r.n, r.m0, r.method, r.rep),
        (Graphon::F1, 12, 0, Method::Alg1, 0)
    );
    assert!(r.total_length >= 0.0 && r.total_length <= 2.0 * r.bound + 1e-12);
    assert!(r.hull_length >= r.total_length - 1e-12 && r.hull_length <= 2.0 * r.bound + 1e-12);
    assert_eq!(r.covered, r.recomputed_coverage());
}

#[test]
fn records_depend_only_on_the_seed() {
    let cfg = config("missingness = \"mcar\"\nm0_values = [4]\niter_max = 3");
    let cell = cfg.cells()[0];
    let a = run_cell(&cfg, &cell).unwrap();
    let b: Vec<Record> = (0..cfg.replications)
        .rev()
        .map(|rep| run_replication(&cfg, &cell, rep))
        .rev()
        .collect();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(
            Record {
                time_ms: 0.0,
                ..x.clone()
            },
            Record {
                time_ms: 0.0,
                ..y.clone()
            }
        );
    }
    let other = ExperimentConfig {
        master_seed: 10,
        ..cfg.clone()
    };
    assert_ne!(run_replication(&other, &cell, 0).seed, a[0].seed);
}

#[test]
fn coverage_is_recomputable_from_the_file() {
    for method in ["alg1", "alg2"] {
        let cfg = ExperimentConfig {
            method: Method::from_name(method).unwrap(),
            replications: 6,
            ..config("missingness = \"mnar\"\nm0_values = [0, 3]")
        };
        let recs = run_experiment(&cfg, |_, _, _, _| {}).unwrap();
        assert_eq!(recs.len(), 12);
        let mut buf = Vec::new();
        write_records(&recs, &mut buf).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        assert_eq!(back, recs);
        for r in &back {
            assert_eq!(r.covered, r.recomputed_coverage(), "{r:?}");
            let len: f64 = r.intervals.iter().map(|iv| iv.hi - iv.lo).sum();
            assert!((len - r.total_length).abs() < 1e-9);
        }
        assert_eq!(summarize(&back).unwrap(), summarize(&recs).unwrap());
    }
}

fn mock(rep: usize, covered: bool, error: Option<&str>) -> Record {
    Record {
        graphon: Graphon::F2,
        n: 50,
        xi_target: 0.5,
        m0: 0,
        method: Method::Alg1,
        rep,
        covered,
        total_length: 1.0,
        hull_length: 1.0,
        is_trivial: false,
        time_ms: 1.0,
        seed: rep as u64,
        truth: if covered { 0.0 } else { 2.0 },
        bound: 4.6,
        intervals: vec![Interval { lo: -0.5, hi: 0.5 }],
        error: error.map(str::to_owned),
    }
}

#[test]
fn bernoulli_mock_coverage_is_near_its_rate() {
    // A fixed LCG decides each record with probability 0.9.
    let mut state = 12345u64;
    let recs: Vec<Record> = (0..1000)
        .map(|rep| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            mock(rep, u < 0.9, None)
        })
        .collect();
    let row = &summarize(&recs).unwrap()[0];
    let expected = recs.iter().filter(|r| r.covered).count() as f64 / 1000.0;
    assert_eq!(row.coverage, Some(expected));
    assert!(
        (expected - 0.9).abs() <= 3.0 * (0.09f64 / 1000.0).sqrt(),
        "{expected}"
    );
    let se = row.coverage_se.unwrap();
    assert!((se - (expected * (1.0 - expected) / 1000.0).sqrt()).abs() < 1e-15);
}

#[test]
fn cells_abort_after_repeated_failures() {
    let cell = Cell {
        graphon: Graphon::F2,
        n: 50,
        xi_target: 0.5,
        m0: 0,
    };
    let some: Vec<Record> = (0..10)
        .map(|r| mock(r, true, (r < MAX_FAILURES - 1).then_some("bad")))
        .collect();
    let kept = check_cell(&cell, some).unwrap();
    assert_eq!(kept.iter().filter(|r| r.failed()).count(), MAX_FAILURES - 1);
    let many: Vec<Record> = (0..10)
        .map(|r| mock(r, true, (r < MAX_FAILURES).then_some("bad")))
        .collect();
    let err = check_cell(&cell, many).unwrap_err();
    assert_eq!(err.failures, MAX_FAILURES);
    assert!(err.to_string().contains("bad"));
}
