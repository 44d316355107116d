use std::f64::consts::PI;
use std::sync::Arc;

use lpbm::bodies::{Body, HPolytope, LqBall, Symmetry};
use lpbm::certify::{FnPotential, Potential};
use lpbm::means::{ExtReal, PVector};
use lpbm::measures::{functional_b_curve, measure, measure_curve, CurveTransform, Density, MeasureConfig};
use lpbm::verify::{
    check_b_property, check_bmi, check_bmi_mset, check_curve_concavity, check_dilation_concavity,
    check_firey_corollary, check_functional_b, check_gaussian_improvement, check_inclusion, check_lifting,
    check_plus1_is_minkowski, check_power_dilation_concavity, lift_to_uniform, log_bm_margin, scan_log_bm,
    trig_support, uhrin_functional_check, Report, ScanLogBmConfig, TripleGrid, Verdict, VerifyConfig,
};

fn cube(r: f64) -> Body {
    LqBall::cube(vec![r, r]).unwrap().into()
}

fn cross(r: f64) -> Body {
    LqBall::new(1.0, vec![r, r]).unwrap().into()
}

fn p2(a: f64, b: f64) -> PVector {
    PVector::from_f64s(&[a, b]).unwrap()
}

fn not_fail(reports: &[Report]) {
    for r in reports {
        assert_ne!(r.verdict, Verdict::Fail, "{r:#?}");
    }
}

#[test]
fn cubes_meet_with_equality() {
    let cfg = VerifyConfig::default();
    let reps = check_bmi(&cube(1.0), &cube(2.0), &Density::lebesgue(2), &p2(1.0, 1.0), &[0.5], &cfg).unwrap();
    let row = &reps[0].rows[0];
    assert!((row.rhs.value - 9.0).abs() < 1e-9);
    assert!((row.lhs.value - 9.0).abs() / 9.0 < 1e-2, "{row:?}");
    assert_eq!(reps[0].verdict, Verdict::Boundary);
}

#[test]
fn equal_operands_give_zero_margin() {
    let cfg = VerifyConfig::default();
    let a = cross(1.0);
    let reps = check_bmi(&a, &a, &Density::gaussian(2), &p2(0.5, 0.8), &[0.3, 0.7], &cfg).unwrap();
    for r in &reps {
        let row = &r.rows[0];
        assert!(row.margin.abs() <= row.tolerance, "{row:?}");
    }
}

#[test]
fn gaussian_cross_versus_cube_passes_on_the_lambda_grid() {
    let cfg = VerifyConfig::default();
    let reps = check_bmi(
        &cross(1.5),
        &cube(0.8),
        &Density::gaussian(2),
        &p2(0.0, 0.0),
        &lpbm::verify::default_lambdas(false),
        &cfg,
    )
    .unwrap();
    assert_eq!(reps.len(), 9);
    not_fail(&reps);
}

#[test]
fn inadmissible_orders_fail_before_integration() {
    let cfg = VerifyConfig::default();
    let density = Density::power_convex(2, -1.0, 1.0).unwrap();
    assert!(check_bmi(&cube(1.0), &cube(2.0), &density, &p2(1.0, 1.0), &[0.5], &cfg).is_err());
}

#[test]
fn two_fold_mset_matches_pairwise_check() {
    let cfg = VerifyConfig::default();
    let (a, b) = (cube(1.0), cross(1.3));
    let dens = Density::lebesgue(2);
    let pair = check_bmi(&a, &b, &dens, &p2(1.0, 1.0), &[0.4], &cfg).unwrap();
    let mset = check_bmi_mset(&[a, b], &[0.6, 0.4], &dens, &p2(1.0, 1.0), &cfg).unwrap();
    let (x, y) = (&pair[0].rows[0], &mset.rows[0]);
    assert!((x.lhs.value - y.lhs.value).abs() < 1e-9 && (x.rhs.value - y.rhs.value).abs() < 1e-9);
}

#[test]
fn three_equal_cubes_and_a_mixed_triple() {
    let cfg = VerifyConfig::default();
    let dens = Density::lebesgue(2);
    let w = [1.0 / 3.0, 1.0 / 3.0, 1.0 - 2.0 / 3.0];
    let same = check_bmi_mset(&[cube(1.0), cube(1.0), cube(1.0)], &w, &dens, &p2(1.0, 1.0), &cfg).unwrap();
    assert!(same.rows[0].margin.abs() / 4.0 < 1e-2);
    let mixed = check_bmi_mset(&[cube(1.0), cross(1.5), cube(0.5)], &[0.2, 0.5, 0.3], &dens, &p2(1.0, 1.0), &cfg).unwrap();
    assert_eq!(mixed.verdict, Verdict::Pass, "{mixed:#?}");
}

#[test]
fn coordinate_wise_combination_sits_inside_firey_combination() {
    let cfg = VerifyConfig::default();
    let rep = check_inclusion(&cross(1.0), &cube(1.0), 0.5, 0.3, 10_000, 7, &cfg).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "{rep:#?}");
    let same = check_inclusion(&cube(1.0), &cube(1.0), 0.0, 0.5, 2_000, 1, &cfg).unwrap();
    assert_eq!(same.verdict, Verdict::Pass);
}

#[test]
fn order_one_combination_is_minkowski() {
    let cfg = VerifyConfig::default();
    for (a, b, l) in [(cube(1.0), cube(2.0), 0.5), (cross(1.0), cube(1.0), 0.5), (cross(1.0), cube(1.0), 0.0)] {
        let rep = check_plus1_is_minkowski(&a, &b, l, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:#?}");
    }
}

#[test]
fn firey_corollary_rows() {
    let cfg = VerifyConfig::default();
    let a = cross(1.0);
    let same = check_firey_corollary(&a, &a, &Density::gaussian(2), 0.5, &[0.5], &cfg).unwrap();
    assert_ne!(same[0].verdict, Verdict::Fail, "{:#?}", same[0]);
    assert_eq!(same[0].rows.len(), 3);
    let mixed = check_firey_corollary(&a, &cube(0.7), &Density::lebesgue(2), 0.5, &[0.25, 0.75], &cfg).unwrap();
    not_fail(&mixed);
    // alpha = -1 needs p >= 2 in the plane
    let heavy = Density::power_convex(2, -1.0, 1.0).unwrap();
    assert!(check_firey_corollary(&a, &a, &heavy, 0.5, &[0.5], &cfg).is_err());
}

#[test]
fn power_convex_dilation_curves_are_concave() {
    let cfg = VerifyConfig::default();
    let triples = TripleGrid::new(0.25, 4.0, 50, 3).unwrap();
    for p in [0.5, 1.0] {
        let density = Density::power_convex(2, -p / 4.0, 1.0).unwrap();
        for body in [cube(1.0), cross(1.0)] {
            let rep = check_power_dilation_concavity(&body, &density, p, &triples, &cfg).unwrap();
            assert_ne!(rep.verdict, Verdict::Fail, "{rep:#?}");
            let rep = check_dilation_concavity(&body, &density, p, &triples, &cfg).unwrap();
            assert_ne!(rep.verdict, Verdict::Fail, "{rep:#?}");
        }
    }
}

#[test]
fn out_of_hypothesis_densities_are_rejected() {
    let cfg = VerifyConfig::default();
    let triples = TripleGrid::new(0.25, 4.0, 4, 0).unwrap();
    assert!(check_power_dilation_concavity(&cube(1.0), &Density::lebesgue(2), 1.0, &triples, &cfg).is_err());
    assert!(check_power_dilation_concavity(&cube(1.0), &Density::gaussian(2), 1.0, &triples, &cfg).is_err());
}

#[test]
fn lebesgue_power_dilation_is_exactly_concave_at_p_over_n() {
    // F(t) = t^{n/p} |A|, so F^{p/n} is linear and every triple is an equality
    let cfg = VerifyConfig::default();
    let p = 0.5;
    let triples = TripleGrid::new(0.25, 4.0, 20, 9).unwrap();
    let curve = measure_curve(
        &cube(1.0),
        &Density::lebesgue(2),
        CurveTransform::DilateTPow { p },
        &triples.nodes(),
        &cfg.measure,
    )
    .unwrap();
    for c in &curve {
        let exact = c.t.powf(2.0 / p) * 4.0;
        assert!((c.estimate.value - exact).abs() <= 1e-9 * exact.max(1.0));
    }
    let rep = check_curve_concavity("sanity", serde_json::json!({}), &curve, ExtReal::Finite(p / 2.0), &triples, &cfg).unwrap();
    for row in &rep.rows {
        assert!(row.margin.abs() <= 1e-9 * row.rhs.value.max(1.0), "{row:?}");
    }
}

#[test]
fn gaussian_improvement_on_boxes_in_the_unit_ball() {
    let cfg = VerifyConfig::default();
    let boxes = |a: f64, b: f64| -> Body { LqBall::cube(vec![a, b]).unwrap().into() };
    let reps = check_gaussian_improvement(&boxes(0.6, 0.3), &boxes(0.2, 0.7), 1.0, &[0.25, 0.5, 0.75], &cfg).unwrap();
    for r in &reps {
        assert_eq!(r.params["exponent"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(r.verdict, Verdict::Pass, "{r:#?}");
    }
    assert!(check_gaussian_improvement(&cube(1.0), &cube(0.5), 1.0, &[0.5], &cfg).is_err());
    let same = check_gaussian_improvement(&cube(0.5), &cube(0.5), 1.0, &[0.5], &cfg).unwrap();
    let row = &same[0].rows[0];
    assert!(row.margin.abs() <= row.tolerance.max(1e-9), "{row:?}");
}

#[test]
fn b_property_for_gaussian_square_and_lebesgue() {
    let cfg = VerifyConfig::default();
    let triples = TripleGrid::new(-1.0, 1.0, 40, 5).unwrap();
    let rep = check_b_property(&Density::gaussian(2), &cube(1.0), &triples, &cfg).unwrap();
    assert_ne!(rep.verdict, Verdict::Fail, "{rep:#?}");
    let flat = check_b_property(&Density::lebesgue(2), &cube(1.0), &triples, &cfg).unwrap();
    for row in &flat.rows {
        assert!(row.margin.abs() <= 1e-9 * row.rhs.value, "{row:?}");
    }
    let heavy = Density::power_convex(2, -0.25, 1.0).unwrap();
    assert!(check_b_property(&heavy, &cube(1.0), &triples, &cfg).is_err());
}

#[test]
fn functional_b_for_two_gaussians_matches_closed_form() {
    // int phi(e^{-t} x) phi(x) dx = (2 pi (1 + e^{-2t}))^{-1/2}
    let cfg = VerifyConfig::default();
    let triples = TripleGrid::new(-1.0, 1.0, 40, 11).unwrap();
    let g = Density::gaussian(1);
    let curve = functional_b_curve(&g, &g, &triples.nodes(), &cfg.measure).unwrap();
    for c in &curve.points {
        let exact = 1.0 / (2.0 * PI * (1.0 + (-2.0 * c.t).exp())).sqrt();
        assert!((c.estimate.value - exact).abs() < 1e-6, "t={} {} vs {exact}", c.t, c.estimate.value);
    }
    let rep = check_functional_b(&g, &g, &triples, &cfg).unwrap();
    assert_ne!(rep.verdict, Verdict::Fail, "{rep:#?}");
}

#[test]
fn b_property_and_functional_curve_agree_node_wise() {
    let cfg = MeasureConfig::default();
    let square = cube(1.0);
    let nodes: Vec<f64> = (0..21).map(|k| -1.0 + k as f64 / 10.0).collect();
    let direct = measure_curve(&square, &Density::gaussian(2), CurveTransform::DilateExpT, &nodes, &cfg).unwrap();
    let indicator = Density::uniform_on(square).unwrap();
    let functional = functional_b_curve(&indicator, &Density::gaussian(2), &nodes, &cfg).unwrap();
    for (a, b) in direct.iter().zip(&functional.points) {
        let err = a.estimate.abs_error + b.estimate.abs_error;
        assert!((a.estimate.value - b.estimate.value).abs() <= 3.0 * err + 1e-9, "{a:?} {b:?}");
    }
}

#[test]
fn uhrin_interval_indicators_meet_with_equality() {
    let cfg = VerifyConfig::default();
    let f = Density::uniform_on(LqBall::cube(vec![1.0]).unwrap().into()).unwrap();
    let g = Density::uniform_on(LqBall::cube(vec![3.0]).unwrap().into()).unwrap();
    let rep = uhrin_functional_check(&f, &g, ExtReal::PosInf, &PVector::from_f64s(&[1.0]).unwrap(), 0.5, &cfg).unwrap();
    let row = &rep.rows[0];
    // |[-2, 2]| = 4 = (|[-1, 1]| + |[-3, 3]|) / 2
    assert!((row.rhs.value - 4.0).abs() < 1e-9);
    assert!((row.lhs.value - 4.0).abs() / 4.0 < 1e-3, "{row:?}");
}

#[test]
fn uhrin_truncated_gaussians_pass() {
    let cfg = VerifyConfig::default();
    let f = Density::gaussian(2).restrict(cube(1.5)).unwrap();
    let g = Density::gaussian(2).restrict(cross(2.0)).unwrap();
    let rep = uhrin_functional_check(&f, &g, ExtReal::ZERO, &p2(0.5, 0.5), 0.5, &cfg).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "{rep:#?}");
}

#[test]
fn uhrin_identity_at_lambda_zero() {
    let cfg = VerifyConfig::default();
    let f = Density::gaussian(1).restrict(LqBall::cube(vec![2.0]).unwrap().into()).unwrap();
    let rep = uhrin_functional_check(&f, &f, ExtReal::ZERO, &PVector::from_f64s(&[1.0]).unwrap(), 0.0, &cfg).unwrap();
    let row = &rep.rows[0];
    assert!(row.margin.abs() <= row.tolerance.max(1e-3 * row.rhs.value), "{row:?}");
}

fn half_square_norm() -> Arc<dyn Potential> {
    Arc::new(FnPotential::new(2, |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1])))
}

#[test]
fn lifting_converges_to_the_gaussian_weight() {
    let rep = check_lifting(half_square_norm(), &[4, 16, 64, 256], &[2.0, 2.0], 41, 0.01, 500, 2).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "{rep:#?}");
    let flat: Arc<dyn Potential> = Arc::new(FnPotential::new(2, |_: &[f64]| 0.0));
    let lift = lift_to_uniform(flat, 8, &[1.0, 1.0], 11).unwrap();
    assert_eq!(lift.sup_distance, 0.0);
}

#[test]
fn lifting_distance_matches_direct_evaluation() {
    let lift = lift_to_uniform(half_square_norm(), 16, &[2.0, 2.0], 41).unwrap();
    let direct = (0..41 * 41)
        .map(|i| {
            let x = [-2.0 + 0.1 * (i % 41) as f64, -2.0 + 0.1 * (i / 41) as f64];
            let v = 0.5 * (x[0] * x[0] + x[1] * x[1]);
            ((1.0 - v / 16.0).max(0.0).powi(16) - (-v).exp()).abs()
        })
        .fold(0.0, f64::max);
    assert!((lift.sup_distance - direct).abs() < 1e-12);
}

#[test]
fn log_bm_margin_vanishes_for_equal_bodies() {
    let h = trig_support(&[1.0, 0.1, 0.05]);
    let (lhs, rhs) = log_bm_margin(&h, &h, 0.4, 256).unwrap();
    assert!((lhs - rhs).abs() < 1e-12 * rhs);
}

#[test]
fn rotated_square_scan_is_recorded() {
    let square = |t: f64| t.cos().abs() + t.sin().abs();
    let rotated = |t: f64| {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ((t.cos() + t.sin()) * s).abs() + ((t.cos() - t.sin()) * s).abs()
    };
    let (lhs, rhs) = log_bm_margin(&square, &rotated, 0.5, 512).unwrap();
    assert!(lhs.is_finite() && rhs > 0.0);
}

#[test]
fn unconditional_scan_never_fails() {
    let scan = ScanLogBmConfig {
        unconditional_only: true,
        budget: 120,
        restarts: 2,
        ..ScanLogBmConfig::default()
    };
    let rep = scan_log_bm(&scan, &VerifyConfig::default()).unwrap();
    assert_ne!(rep.verdict, Verdict::Fail, "{rep:#?}");
    let again = scan_log_bm(&scan, &VerifyConfig::default()).unwrap();
    assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&again).unwrap());
}

#[test]
fn reports_are_deterministic() {
    let cfg = VerifyConfig::default();
    let poly: Body = HPolytope::new(vec![(vec![1.0, 0.5], 1.0)], Symmetry::Unconditional).unwrap().into();
    let run = || check_bmi(&poly, &cube(0.6), &Density::gaussian(2), &p2(0.5, 0.8), &[0.5], &cfg).unwrap();
    assert_eq!(serde_json::to_string(&run()).unwrap(), serde_json::to_string(&run()).unwrap());
}

#[test]
fn lower_mean_order_never_raises_the_rhs() {
    let cfg = VerifyConfig::default();
    let (a, b) = (cube(1.0), cross(1.7));
    let dens = Density::lebesgue(2);
    let hi = check_bmi(&a, &b, &dens, &p2(1.0, 1.0), &[0.3], &cfg).unwrap();
    let lo = check_bmi(&a, &b, &dens, &p2(0.5, 0.5), &[0.3], &cfg).unwrap();
    assert!(lo[0].rows[0].rhs.value <= hi[0].rows[0].rhs.value + 1e-12);
}

#[test]
fn classical_brunn_minkowski_collapse() {
    // p = (1, 1), Lebesgue: gamma = 1/2, the classical square-root form
    let cfg = VerifyConfig::default();
    let (a, b) = (cross(1.0), cube(0.5));
    let dens = Density::lebesgue(2);
    let rep = &check_bmi(&a, &b, &dens, &p2(1.0, 1.0), &[0.5], &cfg).unwrap()[0];
    let (va, vb) = (measure(&a, &dens, &cfg.measure).unwrap().value, measure(&b, &dens, &cfg.measure).unwrap().value);
    let classical = (0.5 * va.sqrt() + 0.5 * vb.sqrt()).powi(2);
    assert!((rep.rows[0].rhs.value - classical).abs() < 1e-9);
    assert_eq!(rep.verdict, Verdict::Pass);
}
