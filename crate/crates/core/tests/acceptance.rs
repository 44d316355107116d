use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lpbm::bodies::{Body, HPolytope, LqBall, Symmetry};
use lpbm::certify::{
    certify_region, criterion_matrix, gaussian_improved_exponent, CertificateVerdict, FnPotential, GaussianPotential,
    Potential, Region, ScanConfig,
};
use lpbm::means::{gamma_compose, p_mean, ExtReal, PVector, Weight};
use lpbm::measures::{functional_b_curve, measure_curve, CurveTransform, Density};
use lpbm::symmetric_eigenvalues;
use lpbm::verify::{
    check_b_property, check_bmi, check_dilation_concavity, check_functional_b, check_gaussian_improvement,
    check_inclusion, check_lifting, check_plus1_is_minkowski, check_power_dilation_concavity, default_lambdas,
    uhrin_functional_check, Report, TripleGrid, Verdict, VerifyConfig,
};

const EQUALITY_REL_TOL: f64 = 1e-2;
const INCLUSION_SAMPLES: usize = 10_000;
const EIGEN_TOL: f64 = 1e-6;
const LIFT_FINAL_BOUND: f64 = 0.01;
const UHRIN_EQUALITY_REL_TOL: f64 = 1e-3;
const MEANS_TUPLES: usize = 10_000;
const CONTINUITY_EPS: f64 = 1e-6;
const CONTINUITY_TOL: f64 = 1e-4;

type Outcome = Result<(bool, String), lpbm::Error>;

fn cube(a: f64, b: f64) -> Body {
    LqBall::cube(vec![a, b]).unwrap().into()
}

fn lq(q: f64, a: f64, b: f64) -> Body {
    LqBall::new(q, vec![a, b]).unwrap().into()
}

fn poly(halfspaces: &[([f64; 2], f64)]) -> Body {
    HPolytope::new(halfspaces.iter().map(|(u, c)| (u.to_vec(), *c)).collect(), Symmetry::Unconditional)
        .unwrap()
        .into()
}

fn octagon() -> Body {
    poly(&[([1.0, 0.0], 1.0), ([0.0, 1.0], 1.0), ([1.0, 1.0], 1.5)])
}

fn pairs() -> Vec<(&'static str, Body, Body)> {
    vec![
        ("cube/cube", cube(1.0, 1.0), cube(2.0, 2.0)),
        ("l1/cube", lq(1.0, 1.5, 1.5), cube(0.8, 0.8)),
        ("l2/l4", lq(2.0, 1.0, 0.6), lq(4.0, 0.7, 1.2)),
        ("octagon/box", octagon(), cube(1.2, 0.5)),
        ("polytope/l1", poly(&[([1.0, 0.5], 1.0)]), lq(1.0, 1.0, 2.0)),
        ("l3/polytope", lq(3.0, 1.5, 0.5), poly(&[([0.3, 1.0], 0.8), ([1.0, 0.2], 1.1)])),
    ]
}

fn count(reports: &[Report], v: Verdict) -> usize {
    reports.iter().filter(|r| r.verdict == v).count()
}

fn bmi_suite() -> Outcome {
    let densities = [
        ("lebesgue", Density::lebesgue(2)),
        ("gaussian", Density::gaussian(2)),
        ("power_convex", Density::power_convex(2, -0.25, 1.0)?),
    ];
    let orders = [[1.0, 1.0], [0.5, 0.8], [0.0, 0.0]];
    let lambdas = default_lambdas(false);
    let (coarse, fine) = (VerifyConfig::with_resolution(256), VerifyConfig::with_resolution(512));
    let (mut runs, mut fails, mut flips, mut skipped) = (0, 0, 0, 0);
    for (_, a, b) in pairs() {
        for (name, density) in &densities {
            for p in orders {
                // the power-convex density is run with p = (1, 1) only
                if *name == "power_convex" && p != [1.0, 1.0] {
                    continue;
                }
                let p = PVector::from_f64s(&p)?;
                if gamma_compose(&p, density.alpha()).is_err() {
                    skipped += 1;
                    continue;
                }
                let at_n = check_bmi(&a, &b, density, &p, &lambdas, &coarse)?;
                let at_2n = check_bmi(&a, &b, density, &p, &lambdas, &fine)?;
                runs += at_n.len();
                fails += count(&at_n, Verdict::Fail);
                flips += at_n
                    .iter()
                    .zip(&at_2n)
                    .filter(|(x, y)| x.verdict == Verdict::Pass && y.verdict == Verdict::Fail)
                    .count();
            }
        }
    }
    Ok((
        fails == 0 && flips == 0 && runs == 6 * 7 * 9,
        format!("{runs} checks, {fails} below -3x error at N=256, {flips} pass->fail flips at N=512, {skipped} inadmissible skipped"),
    ))
}

fn equality_calibration() -> Outcome {
    let p = PVector::from_f64s(&[1.0, 1.0])?;
    let reps = check_bmi(&cube(1.0, 1.0), &cube(2.0, 2.0), &Density::lebesgue(2), &p, &[0.5], &VerifyConfig::default())?;
    let row = &reps[0].rows[0];
    let rel = row.margin.abs() / 9.0;
    Ok((
        rel <= EQUALITY_REL_TOL && (row.rhs.value - 9.0).abs() < 1e-12,
        format!("lhs {:.6}, rhs {:.6}, relative margin {rel:.2e}", row.lhs.value, row.rhs.value),
    ))
}

fn inclusion() -> Outcome {
    let cfg = VerifyConfig::default();
    let cases = [
        (lq(1.0, 1.0, 1.0), cube(1.0, 1.0), 0.3),
        (lq(2.0, 1.0, 0.6), lq(4.0, 0.7, 1.2), 0.5),
        (octagon(), lq(1.0, 1.0, 2.0), 0.7),
    ];
    let (mut total, mut passed) = (0, 0);
    for (i, (a, b, l)) in cases.iter().enumerate() {
        for p in [0.0, 0.5, 1.0] {
            let rep = check_inclusion(a, b, p, *l, INCLUSION_SAMPLES, 100 + i as u64, &cfg)?;
            total += 1;
            passed += usize::from(rep.verdict == Verdict::Pass);
        }
    }
    Ok((passed == total, format!("{passed}/{total} runs with {INCLUSION_SAMPLES} samples fully contained")))
}

fn recover_minkowski() -> Outcome {
    let cfg = VerifyConfig::with_resolution(256);
    let cases = [
        (cube(1.0, 1.0), cube(2.0, 2.0)),
        (lq(1.0, 1.0, 1.0), cube(1.0, 1.0)),
        (lq(3.0, 1.5, 0.5), octagon()),
    ];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (a, b) in &cases {
        let rep = check_plus1_is_minkowski(a, b, 0.5, &cfg)?;
        let row = &rep.rows[0];
        worst = worst.max(row.rhs.value / row.lhs.value * 2.0);
        ok &= rep.verdict == Verdict::Pass;
    }
    Ok((ok, format!("worst Hausdorff distance {worst:.3} cells (allowance 2)")))
}

fn dilation_concavity() -> Outcome {
    let cfg = VerifyConfig::default();
    let triples = TripleGrid::new(0.25, 4.0, 50, 5)?;
    let mut reports = Vec::new();
    for p in [0.5, 1.0] {
        let density = Density::power_convex(2, -p / 4.0, 1.0)?;
        for body in [cube(1.0, 1.0), lq(1.0, 1.0, 1.0)] {
            reports.push(check_power_dilation_concavity(&body, &density, p, &triples, &cfg)?);
            reports.push(check_dilation_concavity(&body, &density, p, &triples, &cfg)?);
        }
    }
    let rows: usize = reports.iter().map(|r| r.rows.len()).sum();
    let violations: usize = reports
        .iter()
        .flat_map(|r| &r.rows)
        .filter(|row| row.verdict == Verdict::Fail)
        .count();
    Ok((violations == 0, format!("{rows} midpoint rows over {} curves, {violations} violations", reports.len())))
}

fn gaussian_improvement() -> Outcome {
    let cfg = VerifyConfig::default();
    let s = gaussian_improved_exponent(ExtReal::Finite(1.0), 2)?;
    let pairs = [
        (cube(0.6, 0.3), cube(0.2, 0.7)),
        (cube(0.5, 0.5), cube(0.7, 0.1)),
        (cube(0.1, 0.9), cube(0.65, 0.65)),
    ];
    let mut reports = Vec::new();
    for (a, b) in &pairs {
        reports.extend(check_gaussian_improvement(a, b, 1.0, &[0.25, 0.5, 0.75], &cfg)?);
    }
    let passed = count(&reports, Verdict::Pass);
    Ok((
        passed == reports.len() && (s - 1.0 / 3.0).abs() < 1e-15,
        format!("{passed}/{} pass with exponent {s:.6}", reports.len()),
    ))
}

fn hessian_certificate() -> Outcome {
    let numeric = FnPotential::new(2, |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1]));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let gamma: f64 = rng.random_range(0.1..3.0);
        let eig = symmetric_eigenvalues(&criterion_matrix(&numeric, gamma, &x)?);
        let r2 = x[0] * x[0] + x[1] * x[1];
        worst = worst.max((eig[0] + 1.0).abs()).max((eig[1] - (gamma * r2 - 1.0)).abs());
    }
    let v = GaussianPotential { dim: 2 };
    let cfg = ScanConfig::default();
    let gamma = 1.0;
    let inside = certify_region(&v, gamma, &Region::Ball { radius: 1.0 / f64::sqrt(gamma) }, &cfg)?;
    let outside = certify_region(&v, gamma, &Region::Ball { radius: 2.0 / f64::sqrt(gamma) }, &cfg)?;
    let witness_r2: f64 = outside.witness.iter().map(|t| t * t).sum();
    let ok = worst <= EIGEN_TOL
        && inside.verdict == CertificateVerdict::Certified
        && outside.verdict == CertificateVerdict::Violated
        && gamma * witness_r2 - 1.0 > 0.0;
    Ok((
        ok,
        format!(
            "max eigenvalue error {worst:.1e}; radius 1: {:?}; radius 2: {:?} at |x| = {:.3}",
            inside.verdict,
            outside.verdict,
            witness_r2.sqrt()
        ),
    ))
}

fn lifting() -> Outcome {
    let v: Arc<dyn Potential> = Arc::new(FnPotential::new(2, |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1])));
    let rep = check_lifting(v, &[4, 16, 64, 256], &[2.0, 2.0], 81, LIFT_FINAL_BOUND, 2000, 3)?;
    let distances: Vec<String> = rep
        .rows
        .iter()
        .take(3)
        .map(|r| format!("{:.4}", r.lhs.value))
        .chain(rep.rows.get(3).map(|r| format!("{:.4}", r.rhs.value)))
        .collect();
    Ok((rep.verdict == Verdict::Pass, format!("distances {}", distances.join(" > "))))
}

fn uhrin() -> Outcome {
    let cfg = VerifyConfig::default();
    let f = Density::gaussian(2).restrict(cube(1.5, 1.5))?;
    let g = Density::gaussian(2).restrict(lq(1.0, 2.0, 2.0))?;
    let half = PVector::from_f64s(&[0.5, 0.5])?;
    let two_d = uhrin_functional_check(&f, &g, ExtReal::ZERO, &half, 0.5, &cfg)?;
    let a = Density::uniform_on(LqBall::cube(vec![1.0])?.into())?;
    let b = Density::uniform_on(LqBall::cube(vec![3.0])?.into())?;
    let one_d = uhrin_functional_check(&a, &b, ExtReal::PosInf, &PVector::from_f64s(&[1.0])?, 0.5, &cfg)?;
    let row = &one_d.rows[0];
    let rel = row.margin.abs() / row.rhs.value;
    Ok((
        two_d.verdict == Verdict::Pass && rel <= UHRIN_EQUALITY_REL_TOL,
        format!("2D truncated Gaussians: {}; 1D intervals relative margin {rel:.2e}", two_d.verdict),
    ))
}

fn b_property() -> Outcome {
    let cfg = VerifyConfig::default();
    let triples = TripleGrid::new(-1.0, 1.0, 40, 13)?;
    let square = cube(1.0, 1.0);
    let gaussian = Density::gaussian(2);
    let b = check_b_property(&gaussian, &square, &triples, &cfg)?;
    let g1 = Density::gaussian(1);
    let fb = check_functional_b(&g1, &g1, &triples, &cfg)?;
    let closed_form = functional_b_curve(&g1, &g1, &triples.nodes(), &cfg.measure)?
        .points
        .iter()
        .map(|c| (c.estimate.value - 1.0 / (2.0 * std::f64::consts::PI * (1.0 + (-2.0 * c.t).exp())).sqrt()).abs())
        .fold(0.0, f64::max);
    let nodes = triples.nodes();
    let direct = measure_curve(&square, &gaussian, CurveTransform::DilateExpT, &nodes, &cfg.measure)?;
    let functional = functional_b_curve(&Density::uniform_on(square)?, &gaussian, &nodes, &cfg.measure)?;
    let mismatches = direct
        .iter()
        .zip(&functional.points)
        .filter(|(x, y)| {
            let err = cfg.tolerance_factor * (x.estimate.abs_error + y.estimate.abs_error);
            (x.estimate.value - y.estimate.value).abs() > err + 1e-12
        })
        .count();
    let violations = [&b, &fb].iter().flat_map(|r| &r.rows).filter(|r| r.verdict == Verdict::Fail).count();
    Ok((
        violations == 0 && mismatches == 0 && closed_form < 1e-6,
        format!(
            "{violations} log-concavity violations over {} rows; {mismatches}/{} node mismatches; closed-form error {closed_form:.1e}",
            b.rows.len() + fb.rows.len(),
            nodes.len()
        ),
    ))
}

fn means_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let order = |rng: &mut ChaCha8Rng| match rng.random_range(0..8) {
        0 => ExtReal::NegInf,
        1 => ExtReal::PosInf,
        2 => ExtReal::ZERO,
        _ => ExtReal::Finite(rng.random_range(-8.0..8.0)),
    };
    let mut bad = 0;
    for _ in 0..MEANS_TUPLES {
        let (p, q) = (order(&mut rng), order(&mut rng));
        let (p, q) = if p.to_f64() <= q.to_f64() { (p, q) } else { (q, p) };
        let l = Weight::new(rng.random_range(0.0..=1.0))?;
        let (a, b, t) = (rng.random_range(0.0..50.0), rng.random_range(0.0..50.0), rng.random_range(0.0..20.0));
        let mp = p_mean(p, l, a, b)?;
        let monotone = mp <= p_mean(q, l, a, b)? * (1.0 + 1e-12) + 1e-300;
        let scaled = p_mean(p, l, t * a, t * b)?;
        let homogeneous = (scaled - t * mp).abs() <= 1e-12 * scaled.max(t * mp).max(1e-300);
        let endpoints = p_mean(p, Weight::new(0.0)?, a, b)? == a && p_mean(p, Weight::new(1.0)?, a, b)? == b;
        let (x, y) = (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0));
        let geo = p_mean(ExtReal::ZERO, l, x, y)?;
        let continuous = (p_mean(ExtReal::Finite(CONTINUITY_EPS), l, x, y)? - geo).abs() < CONTINUITY_TOL
            && (p_mean(ExtReal::Finite(-CONTINUITY_EPS), l, x, y)? - geo).abs() < CONTINUITY_TOL;
        bad += usize::from(!(monotone && homogeneous && endpoints && continuous));
    }
    let ones = PVector::from_f64s(&[1.0, 1.0])?;
    let lebesgue = gamma_compose(&ones, ExtReal::PosInf)?;
    let boundary = gamma_compose(&ones, ExtReal::Finite(-0.5))?;
    Ok((
        bad == 0 && lebesgue == ExtReal::Finite(0.5) && boundary == ExtReal::NegInf,
        format!("{bad}/{MEANS_TUPLES} tuples violate a property; gamma {lebesgue} and {boundary} at the boundary"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("coordinate-wise BM suite", bmi_suite),
        ("equality calibration", equality_calibration),
        ("inclusion", inclusion),
        ("order-one recovers Minkowski", recover_minkowski),
        ("dilation concavity", dilation_concavity),
        ("Gaussian improvement", gaussian_improvement),
        ("Hessian certificate", hessian_certificate),
        ("lifting", lifting),
        ("Uhrin functional check", uhrin),
        ("(B) property and functional (B)", b_property),
        ("means kernel", means_kernel),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!ok);
        println!(
            "{} [{:>2}] {name}: {detail} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
