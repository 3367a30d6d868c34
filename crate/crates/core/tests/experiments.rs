use pwcis::criteria::Thresholds;
use pwcis::experiments::{
    counterexample, lemma1_matrix, operator_probe, stability_sweep, Lemma1Config, Orientation,
};
use pwcis::interp::GridSpec;
use pwcis::nodes::{from_file, make_family};
use pwcis::{ExponentP, FamilyKind, FamilySpec, GenFnEvaluator};

fn p2() -> ExponentP {
    ExponentP::new(2.0).unwrap()
}

fn signed(d: f64, k: u32) -> GenFnEvaluator {
    GenFnEvaluator::build(
        make_family(&FamilySpec::new(FamilyKind::Signed, d), k).unwrap(),
        1e-2,
    )
    .unwrap()
}

#[test]
fn stability_ratio_is_stable_under_window_doubling() {
    let grid = GridSpec::new(-200.0, 200.0, 0.02).unwrap();
    let small = stability_sweep(&signed(0.2, 2000), p2(), 50, 20, &grid, 11).unwrap();
    let large = stability_sweep(&signed(0.2, 4000), p2(), 50, 20, &grid, 11).unwrap();
    assert_eq!(small.ratios.len(), 50);
    assert!(small.max_ratio.is_finite() && small.max_ratio > 0.0);
    assert!(
        (large.max_ratio / small.max_ratio - 1.0).abs() < 0.01,
        "{} vs {}",
        small.max_ratio,
        large.max_ratio
    );
}

#[test]
fn sub_critical_quotients_do_not_grow() {
    let xs: Vec<f64> = (5..=12).map(|m| 2f64.powi(m)).collect();
    let r = counterexample(p2(), 0.2, &xs, 8192, None, &Thresholds::default()).unwrap();
    assert!(r.growing.is_empty(), "{r:?}");
    for o in &r.orientations {
        assert!((o.f_exponent - o.f_exponent_expected).abs() < 0.05);
    }
}

#[test]
fn critical_quotients_grow_in_both_orientations_at_p2() {
    let xs: Vec<f64> = (5..=12).map(|m| 2f64.powi(m)).collect();
    let r = counterexample(p2(), 0.25, &xs, 8192, None, &Thresholds::default()).unwrap();
    assert_eq!(r.growing, vec![Orientation::Outward, Orientation::Inward]);
    for o in &r.orientations {
        assert!((o.f_exponent - o.f_exponent_expected).abs() < 0.05);
        assert!(o
            .series
            .iter()
            .any(|s| s.fires && s.fit.slope > 0.0 && s.fit.r2 >= 0.9));
    }
}

#[test]
fn sigma_choice_changes_probe_by_less_than_four() {
    let cfg = Lemma1Config {
        half_window: 1024,
        windows: vec![16, 32, 64, 128],
        ..Default::default()
    };
    let cells = lemma1_matrix(p2(), &[0.2], &cfg).unwrap();
    assert_eq!(cells.len(), 3);
    for c in &cells {
        assert!(c.sigma_choice_ratio < 4.0, "{c:?}");
        assert_eq!(c.row.windows, cfg.windows);
    }
    let exp = cells.last().unwrap();
    assert!(!exp.row.ap_stable && !exp.row.probe_stable);
}

#[test]
fn operator_probe_needs_room_for_the_squares() {
    let cfg = Lemma1Config {
        windows: vec![16, 512],
        ..Default::default()
    };
    assert!(operator_probe(&signed(0.1, 1000), p2(), &cfg).is_err());
}

#[test]
fn family_file_round_trip_keeps_node_values() {
    let spec = FamilySpec::new(FamilyKind::Alternating, 0.15);
    let seq = make_family(&spec, 300).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nodes.csv");
    seq.write_csv(std::fs::File::create(&path).unwrap())
        .unwrap();
    let back = from_file(&path).unwrap();
    assert_eq!(back.nodes(), seq.nodes());
    // The file carries no tail, so S differs by the tail product only;
    // derivatives near the centre agree closely.
    let a = GenFnEvaluator::build(seq, 1e-2).unwrap();
    let b = GenFnEvaluator::build(back, 1e-2).unwrap();
    let da = a.derivative_at_index(0).unwrap();
    let db = b.derivative_at_index(0).unwrap();
    assert!((da / db - 1.0).norm() < 1e-2, "{da} vs {db}");
}
