use serde_json::{json, Value};

use super::{check_lambdas, fmt_ext, mean_with_error, weight, Estimate, Report, TripleGrid, VerifyConfig};
use crate::bodies::{minkowski_combine, Body};
use crate::certify::gaussian_improved_exponent;
use crate::error::{check_dim, domain, Error, Result};
use crate::means::{gamma_compose, ExtReal, PVector, BOUNDARY_EPS};
use crate::measures::{functional_b_curve, measure, measure_curve, CurvePoint, CurveTransform, Density};

/// `F(t_mid) >= M_e^{1/2}(F(t1), F(t2))` for every triple; `curve` must hold
/// every node of `triples`.
pub fn check_curve_concavity(
    check: &str,
    params: Value,
    curve: &[CurvePoint],
    exponent: ExtReal,
    triples: &TripleGrid,
    cfg: &VerifyConfig,
) -> Result<Report> {
    let lookup = |t: f64| -> Result<Estimate> {
        curve
            .iter()
            .find(|c| c.t == t)
            .map(|c| Estimate::from(&c.estimate))
            .ok_or_else(|| domain(format!("curve has no node at t = {t}")))
    };
    let half = weight(0.5)?;
    let mut report = Report::new(check, params);
    for &(t1, tm, t2) in &triples.triples {
        let lhs = lookup(tm)?;
        let rhs = mean_with_error(exponent, half, lookup(t1)?, lookup(t2)?)?;
        report.push(cfg.row(format!("t=({t1:.6}, {t2:.6})"), lhs, rhs));
    }
    Ok(report)
}

/// Checks `alpha in [-p/n, 0)` and returns `gamma = (n/p + 1/alpha)^{-1}`.
fn hypothesis_gamma(density: &Density, p: f64) -> Result<ExtReal> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("p = {p} outside (0, 1]")));
    }
    let n = density.dim() as f64;
    let floor = -p / n;
    match density.alpha() {
        ExtReal::Finite(a) if a < 0.0 && a >= floor - BOUNDARY_EPS * floor.abs() => {}
        other => {
            return Err(domain(format!(
                "alpha = {other} is outside the hypothesis range [-p/n, 0) = [{floor}, 0)"
            )))
        }
    }
    gamma_compose(&PVector::uniform(ExtReal::Finite(p), density.dim()), density.alpha())
}

fn curve_params(body: &Body, density: &Density, p: f64, exponent: ExtReal, triples: &TripleGrid, cfg: &VerifyConfig) -> Value {
    json!({
        "body": format!("{body:?}"),
        "density": format!("{density:?}"),
        "p": p,
        "exponent": fmt_ext(exponent),
        "range": [triples.range.0, triples.range.1],
        "triples": triples.len(),
        "resolution": cfg.measure.resolution_for(density.dim()),
    })
}

/// Midpoint `gamma`-concavity of `t -> mu(t^{1/p} A)`.
pub fn check_power_dilation_concavity(
    body: &Body,
    density: &Density,
    p: f64,
    triples: &TripleGrid,
    cfg: &VerifyConfig,
) -> Result<Report> {
    check_dim(density.dim(), body.dim())?;
    let gamma = hypothesis_gamma(density, p)?;
    if !(triples.range.0 > 0.0) {
        return Err(domain("power dilation curves need t > 0"));
    }
    let curve = measure_curve(body, density, CurveTransform::DilateTPow { p }, &triples.nodes(), &cfg.measure)?;
    let params = curve_params(body, density, p, gamma, triples, cfg);
    check_curve_concavity("check_power_dilation_concavity", params, &curve, gamma, triples, cfg)
}

/// Midpoint `((1-p)/n + gamma)`-concavity of `t -> mu(t A)`.
pub fn check_dilation_concavity(
    body: &Body,
    density: &Density,
    p: f64,
    triples: &TripleGrid,
    cfg: &VerifyConfig,
) -> Result<Report> {
    check_dim(density.dim(), body.dim())?;
    let gamma = hypothesis_gamma(density, p)?;
    let exponent = ExtReal::Finite((1.0 - p) / density.dim() as f64).checked_add(gamma)?;
    if triples.range.0 < 0.0 {
        return Err(domain("dilation curves need t >= 0"));
    }
    let curve = measure_curve(body, density, CurveTransform::DilateT, &triples.nodes(), &cfg.measure)?;
    let params = curve_params(body, density, p, exponent, triples, cfg);
    check_curve_concavity("check_dilation_concavity", params, &curve, exponent, triples, cfg)
}

fn log_concave(alpha: ExtReal) -> bool {
    match alpha {
        ExtReal::NegInf => false,
        ExtReal::Finite(a) => a >= 0.0,
        ExtReal::PosInf => true,
    }
}

/// Midpoint log-concavity of `t -> mu(e^t A)`.
pub fn check_b_property(density: &Density, body: &Body, triples: &TripleGrid, cfg: &VerifyConfig) -> Result<Report> {
    check_dim(density.dim(), body.dim())?;
    if !log_concave(density.alpha()) {
        return Err(domain("the measure must be log-concave"));
    }
    if !body.is_unconditional() || !density.is_unconditional() {
        return Err(domain("the unconditional case is the one checked"));
    }
    let curve = measure_curve(body, density, CurveTransform::DilateExpT, &triples.nodes(), &cfg.measure)?;
    let params = curve_params(body, density, 1.0, ExtReal::ZERO, triples, cfg);
    check_curve_concavity("check_b_property", params, &curve, ExtReal::ZERO, triples, cfg)
}

/// Midpoint log-concavity of `t -> int f(e^{-t} x) g(x) dx`.
pub fn check_functional_b(f: &Density, g: &Density, triples: &TripleGrid, cfg: &VerifyConfig) -> Result<Report> {
    if !log_concave(f.alpha()) || !log_concave(g.alpha()) {
        return Err(domain("both functions must be log-concave"));
    }
    let curve = functional_b_curve(f, g, &triples.nodes(), &cfg.measure)?;
    let params = json!({
        "f": format!("{f:?}"),
        "g": format!("{g:?}"),
        "range": [triples.range.0, triples.range.1],
        "triples": triples.len(),
        "resolution": cfg.measure.resolution_for(f.dim()),
        "truncation": curve.truncation.last(),
    });
    check_curve_concavity("check_functional_b", params, &curve.points, ExtReal::ZERO, triples, cfg)
}

/// `gamma_n((1-l)A + lB) >= M_s^l(gamma_n(A), gamma_n(B))` with
/// `s = gamma / (1 + gamma n)`, for operands inside the centered ball of
/// radius `1/sqrt(gamma)`.
pub fn check_gaussian_improvement(
    a: &Body,
    b: &Body,
    gamma: f64,
    lambdas: &[f64],
    cfg: &VerifyConfig,
) -> Result<Vec<Report>> {
    check_dim(a.dim(), b.dim())?;
    check_lambdas(lambdas)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(domain(format!("gamma must be positive and finite, got {gamma}")));
    }
    let radius = 1.0 / gamma.sqrt();
    for (name, body) in [("A", a), ("B", b)] {
        if body.out_radius() > radius * (1.0 + 1e-12) {
            return Err(domain(format!(
                "operand {name} has out-radius {} beyond 1/sqrt(gamma) = {radius}",
                body.out_radius()
            )));
        }
    }
    if !a.has_support() || !b.has_support() {
        return Err(Error::Unsupported("Minkowski combination needs support oracles".into()));
    }
    let n = a.dim();
    let s = gaussian_improved_exponent(ExtReal::Finite(gamma), n)?;
    let density = Density::gaussian(n);
    let ma = Estimate::from(&measure(a, &density, &cfg.measure)?);
    let mb = Estimate::from(&measure(b, &density, &cfg.measure)?);
    lambdas
        .iter()
        .map(|&l| {
            let w = weight(l)?;
            let sum = minkowski_combine(a, b, w)?;
            let lhs = Estimate::from(&measure(&sum, &density, &cfg.measure)?);
            let rhs = mean_with_error(ExtReal::Finite(s), w, ma, mb)?;
            let mut report = Report::new(
                "check_gaussian_improvement",
                json!({
                    "a": format!("{a:?}"),
                    "b": format!("{b:?}"),
                    "gamma": gamma,
                    "exponent": s,
                    "lambda": l,
                    "resolution": cfg.measure.resolution_for(n),
                }),
            );
            report.push(cfg.row(format!("lambda={l}"), lhs, rhs));
            Ok(report)
        })
        .collect()
}
