use lpbm::bodies::{dilate, Body, LqBall};
use lpbm::means::{alpha_to_s, p_mean, ExtReal, Weight};
use lpbm::measures::{alpha_concavity_violations, measure, Density, MeasureConfig};
use proptest::prelude::*;

fn boxed(a: f64, b: f64) -> Body {
    LqBall::cube(vec![a, b]).unwrap().into()
}

/// Composite Simpson rule for the standard normal density on `[-r, r]`.
fn normal_mass(r: f64) -> f64 {
    let n = 20_000;
    let h = 2.0 * r / n as f64;
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = phi(-r) + phi(r);
    for k in 1..n {
        let x = -r + k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * phi(x);
    }
    s * h / 3.0
}

#[test]
fn closed_form_measures() {
    let cfg = MeasureConfig::default();
    let leb = Density::lebesgue(2);
    assert!((measure(&boxed(1.0, 2.0), &leb, &cfg).unwrap().value - 8.0).abs() < 1e-9);
    let cross: Body = LqBall::new(1.0, vec![1.0, 1.0]).unwrap().into();
    let m = measure(&cross, &leb, &cfg).unwrap();
    assert!((m.value - 2.0).abs() <= 3.0 * m.abs_error + 1e-3, "{m:?}");
    let g = measure(&boxed(1.0, 1.0), &Density::gaussian(2), &cfg).unwrap();
    let oracle = normal_mass(1.0).powi(2);
    assert!((g.value - oracle).abs() < 1e-3 && (oracle - 0.4661).abs() < 1e-4);
}

#[test]
fn built_ins_pass_ten_thousand_triples() {
    for d in [Density::gaussian(2), Density::power_convex(2, -0.25, 1.0).unwrap(), Density::lebesgue(3)] {
        assert_eq!(alpha_concavity_violations(&d, 10_000, 4.0, 99).unwrap(), 0);
    }
}

#[test]
fn refinement_error_shrinks() {
    let cross: Body = LqBall::new(1.0, vec![1.0, 1.5]).unwrap().into();
    let d = Density::gaussian(2);
    let errs: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|n| measure(&cross, &d, &MeasureConfig::with_resolution(*n)).unwrap().abs_error)
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monotone_under_inclusion(q in 1.0f64..6.0, r0 in 0.3f64..2.0, r1 in 0.3f64..2.0, t in 0.2f64..1.0) {
        let outer: Body = LqBall::new(q, vec![r0, r1]).unwrap().into();
        let inner = dilate(&outer, t).unwrap();
        let cfg = MeasureConfig::with_resolution(128);
        for d in [Density::gaussian(2), Density::power_convex(2, -0.3, 1.0).unwrap()] {
            let (a, b) = (measure(&inner, &d, &cfg).unwrap(), measure(&outer, &d, &cfg).unwrap());
            prop_assert!(a.value <= b.value + a.abs_error + b.abs_error);
        }
    }

    #[test]
    fn octant_symmetry_factor(q in 1.0f64..6.0, r0 in 0.3f64..2.0, r1 in 0.3f64..2.0) {
        // a product density of x and y: the grid value equals the 2^n octant sum
        let body: Body = LqBall::new(q, vec![r0, r1]).unwrap().into();
        let cfg = MeasureConfig::default();
        let full = measure(&body, &Density::gaussian(2), &cfg).unwrap();
        let octant = Density::custom(2, "octant gaussian", ExtReal::ZERO, false, None, |x: &[f64]| {
            if x[0] >= 0.0 && x[1] >= 0.0 {
                4.0 * (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp() / (2.0 * std::f64::consts::PI)
            } else {
                0.0
            }
        });
        let direct = measure(&body, &octant, &cfg).unwrap();
        let tol = 3.0 * (full.abs_error + direct.abs_error) + 1e-9;
        prop_assert!((full.value - direct.value).abs() <= tol, "{full:?} {direct:?}");
    }

    #[test]
    fn power_convex_measure_is_s_concave(
        alpha in -0.5f64..-0.05, a0 in 0.2f64..3.0, a1 in 0.2f64..3.0, b0 in 0.2f64..3.0, b1 in 0.2f64..3.0, l in 0.05f64..0.95,
    ) {
        // boxes combine exactly under Minkowski addition
        let d = Density::power_convex(2, alpha, 1.0).unwrap();
        let s = alpha_to_s(ExtReal::Finite(alpha), 2).unwrap();
        let cfg = MeasureConfig::with_resolution(128);
        let mid = boxed((1.0 - l) * a0 + l * b0, (1.0 - l) * a1 + l * b1);
        let (ma, mb, mm) = (
            measure(&boxed(a0, a1), &d, &cfg).unwrap(),
            measure(&boxed(b0, b1), &d, &cfg).unwrap(),
            measure(&mid, &d, &cfg).unwrap(),
        );
        let rhs = p_mean(s, Weight::new(l).unwrap(), ma.value, mb.value).unwrap();
        let err = mm.abs_error + ma.abs_error + mb.abs_error;
        prop_assert!(mm.value >= rhs - 3.0 * err, "{} < {rhs}", mm.value);
    }
}
