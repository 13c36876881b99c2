use mflab::experiments::{
    a1_reduction_experiment, decay_experiment, fit_line, report, thm1_scaling_experiment, A1ReductionParams,
    DecayParams, ExperimentRecord, RecordStore, Thm1Params,
};

fn small_thm1(seed: u64) -> Thm1Params {
    let mut p = Thm1Params::new(vec![1, 2, 4], seed);
    p.trials = 2;
    p.n_doubling = false;
    p
}

#[test]
fn same_seed_same_record() {
    let a = thm1_scaling_experiment(&small_thm1(3)).unwrap();
    let b = thm1_scaling_experiment(&small_thm1(3)).unwrap();
    assert!(a.max_relative_difference(&b) <= 1e-9);
    let c = thm1_scaling_experiment(&small_thm1(4)).unwrap();
    assert!(a.max_relative_difference(&c) > 1e-9);
}

#[test]
fn gauss_sum_decay_is_exactly_half() {
    let rec = decay_experiment(&DecayParams::gauss_sum(vec![3, 5, 7, 11, 13])).unwrap();
    assert!((rec.number("slope").unwrap() + 0.5).abs() < 1e-9);
}

#[test]
fn constant_lambda_field_has_no_a1() {
    let mut p = A1ReductionParams::new(1, 64, 2);
    p.lambda_field = mflab::experiments::LambdaField::Constant { lambda: 0.2 };
    p.n_doubling = false;
    let rec = a1_reduction_experiment(&p).unwrap();
    assert_eq!(rec.number("a1"), Some(0.0));
}

#[test]
fn records_round_trip_through_the_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = RecordStore::new(dir.path().join("records.jsonl"));
    let mut rec = ExperimentRecord::new("probe").param("seed", 1).param("N", 64);
    rec.set("value", 0.25);
    rec.set("series", vec![1.0, 2.0]);
    rec.bound("value", "lower");
    rec.flag("desk_scale");
    rec.flag("desk_scale");
    store.append(&rec).unwrap();
    store.append(&rec).unwrap();
    let back = store.load().unwrap();
    assert_eq!(back, vec![rec.clone(), rec.clone()]);
    assert_eq!(back[0].flags, vec!["desk_scale".to_string()]);

    let rep = report(&back);
    let table = &rep.tables["probe"];
    assert!(table.starts_with("param.N,param.seed,"));
    assert_eq!(table.lines().count(), 3);
    assert!(rep.summary.contains("value: lower bound"));
}

#[test]
fn least_squares_recovers_a_line() {
    let xs = [0.0, 1.0, 2.0, 3.0];
    let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
    let fit = fit_line(&xs, &ys).unwrap();
    assert!((fit.slope + 0.5).abs() < 1e-14 && (fit.intercept - 2.0).abs() < 1e-14);
    assert!(fit.rms_residual < 1e-14);
    assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_err());
}
