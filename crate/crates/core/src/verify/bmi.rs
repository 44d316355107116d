use serde_json::json;

use super::{check_lambdas, fmt_ext, mean_m_with_error, mean_with_error, weight, Estimate, Report, VerifyConfig};
use crate::bodies::{coord_combine, Body, CombinationSpec};
use crate::error::{check_dim, domain, Result};
use crate::means::{gamma_compose, PVector};
use crate::measures::{measure, Density};

pub(super) fn check_inputs(bodies: &[&Body], density: &Density, p: &PVector) -> Result<()> {
    let dim = density.dim();
    check_dim(dim, p.len())?;
    for body in bodies {
        check_dim(dim, body.dim())?;
        if !body.is_unconditional() {
            return Err(domain("coordinate-wise combinations need unconditional bodies"));
        }
    }
    if !density.is_unconditional() {
        return Err(domain("the measure must be unconditional"));
    }
    Ok(())
}

/// Measure of a grid combination with the error taken as the larger of the
/// rebuild-at-half-resolution change and the coarsening change.
pub(super) fn grid_lhs(build: impl Fn(usize) -> Result<Body>, density: &Density, cfg: &VerifyConfig) -> Result<Estimate> {
    let n = cfg.measure.resolution_for(density.dim());
    let fine = measure(&build(n)?, density, &cfg.measure)?;
    let coarse = measure(&build(n / 2)?, density, &cfg.measure)?;
    Ok(Estimate::new(fine.value, (fine.value - coarse.value).abs().max(fine.abs_error)))
}

/// `mu((1 - l) A +_p l B) >= M_gamma^l(mu(A), mu(B))` for each `l`, with
/// `gamma = (sum_i 1/p_i + 1/alpha)^{-1}`.
pub fn check_bmi(
    a: &Body,
    b: &Body,
    density: &Density,
    p: &PVector,
    lambdas: &[f64],
    cfg: &VerifyConfig,
) -> Result<Vec<Report>> {
    check_inputs(&[a, b], density, p)?;
    check_lambdas(lambdas)?;
    let gamma = gamma_compose(p, density.alpha())?;
    let ma = Estimate::from(&measure(a, density, &cfg.measure)?);
    let mb = Estimate::from(&measure(b, density, &cfg.measure)?);
    lambdas
        .iter()
        .map(|&l| {
            let w = weight(l)?;
            let lhs = grid_lhs(
                |n| {
                    let spec = CombinationSpec::coord(a.clone(), b.clone(), w, p.clone());
                    Ok(coord_combine(&spec, n)?.into())
                },
                density,
                cfg,
            )?;
            let rhs = mean_with_error(gamma, w, ma, mb)?;
            let mut report = Report::new(
                "check_bmi",
                json!({
                    "a": format!("{a:?}"),
                    "b": format!("{b:?}"),
                    "density": format!("{density:?}"),
                    "p": p.as_slice().iter().map(|x| fmt_ext(*x)).collect::<Vec<_>>(),
                    "alpha": fmt_ext(density.alpha()),
                    "gamma": fmt_ext(gamma),
                    "lambda": l,
                    "resolution": cfg.measure.resolution_for(density.dim()),
                }),
            );
            report.push(cfg.row(format!("lambda={l}"), lhs, rhs));
            Ok(report)
        })
        .collect()
}

/// m-fold version: `mu(l_1 A_1 +_p ... +_p l_m A_m) >= M_gamma(mu(A_i); l)`,
/// the combination built left-associated.
pub fn check_bmi_mset(
    bodies: &[Body],
    weights: &[f64],
    density: &Density,
    p: &PVector,
    cfg: &VerifyConfig,
) -> Result<Report> {
    if bodies.len() < 2 || bodies.len() != weights.len() {
        return Err(domain("need at least two bodies and one weight per body"));
    }
    if weights.iter().any(|w| !(*w > 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(domain("weights must be positive and sum to 1"));
    }
    check_inputs(&bodies.iter().collect::<Vec<_>>(), density, p)?;
    let gamma = gamma_compose(p, density.alpha())?;
    let chain = |n: usize| -> Result<Body> {
        let mut acc = bodies[0].clone();
        let mut mass = weights[0];
        for (body, w) in bodies.iter().zip(weights).skip(1) {
            let spec = CombinationSpec::coord(acc, body.clone(), weight(w / (mass + w))?, p.clone());
            acc = coord_combine(&spec, n)?.into();
            mass += w;
        }
        Ok(acc)
    };
    let lhs = grid_lhs(chain, density, cfg)?;
    let values = bodies
        .iter()
        .map(|b| Ok(Estimate::from(&measure(b, density, &cfg.measure)?)))
        .collect::<Result<Vec<_>>>()?;
    let rhs = mean_m_with_error(gamma, weights, &values)?;
    let mut report = Report::new(
        "check_bmi_mset",
        json!({
            "bodies": bodies.iter().map(|b| format!("{b:?}")).collect::<Vec<_>>(),
            "weights": weights,
            "density": format!("{density:?}"),
            "p": p.as_slice().iter().map(|x| fmt_ext(*x)).collect::<Vec<_>>(),
            "gamma": fmt_ext(gamma),
            "resolution": cfg.measure.resolution_for(density.dim()),
        }),
    );
    report.push(cfg.row(format!("m={}", bodies.len()), lhs, rhs));
    Ok(report)
}
