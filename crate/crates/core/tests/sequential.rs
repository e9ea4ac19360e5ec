use xorlab::sequential::{run_sweep, SweepConfig};

fn records(config: &SweepConfig, threads: usize) -> Vec<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    pool.install(|| {
        let mut out = Vec::new();
        run_sweep(config, |r| out.push(serde_json::to_string(r).unwrap())).unwrap();
        out
    })
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let config = SweepConfig {
        seed: 21,
        dims: vec![2, 4],
        samples: 300,
        shards: 5,
    };
    assert_eq!(records(&config, 1), records(&config, 3));
}

#[test]
fn zero_samples_pass() {
    let config = SweepConfig {
        samples: 0,
        ..SweepConfig::default()
    };
    let s = run_sweep(&config, |_| panic!("no records expected")).unwrap();
    assert!(s.pass);
    assert!(s.dims.iter().all(|d| d.accepted == 0));
}

#[test]
fn bad_configs_are_rejected() {
    let zero_shards = SweepConfig {
        shards: 0,
        ..SweepConfig::default()
    };
    assert!(run_sweep(&zero_shards, |_| {}).is_err());
    let scalar = SweepConfig {
        dims: vec![1],
        ..SweepConfig::default()
    };
    assert!(run_sweep(&scalar, |_| {}).is_err());
}

#[test]
fn larger_dimensions_are_clean() {
    let config = SweepConfig {
        seed: 4,
        dims: vec![16],
        samples: 500,
        shards: 4,
    };
    let s = run_sweep(&config, |r| assert!(!r.accepted || r.pass)).unwrap();
    assert!(s.pass);
    assert_eq!(s.dims[0].accepted, 500);
}
