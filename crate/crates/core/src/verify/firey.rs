use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::bmi::{check_inputs, grid_lhs};
use super::{check_lambdas, fmt_ext, mean_with_error, weight, Estimate, Report, Row, Verdict, VerifyConfig};
use crate::bodies::{
    coord_combine, directions, firey_combine, hausdorff_distance, minkowski_combine, support_membership, Body,
    CombinationSpec,
};
use crate::error::{check_dim, domain, Error, Result};
use crate::means::{gamma_compose, p_mean, ExtReal, PVector};
use crate::measures::{measure, Density};

fn check_order(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("order p = {p} outside [0, 1]")));
    }
    Ok(())
}

fn need_support(a: &Body, b: &Body) -> Result<()> {
    if !a.has_support() || !b.has_support() {
        return Err(Error::Unsupported("Firey combinations need support oracles".into()));
    }
    Ok(())
}

fn direction_count(cfg: &VerifyConfig, dim: usize) -> usize {
    cfg.directions.unwrap_or_else(|| directions::default_count(dim))
}

/// Samples marked cells of `(1 - l) A +_p~ l B` (centers moved one cell
/// toward the origin, random signs) and tests them against the Firey
/// combination of the same order, both as a Wulff shape on the configured
/// directions and through the support inequality refined over all
/// directions. Passes iff every sample is inside both.
pub fn check_inclusion(
    a: &Body,
    b: &Body,
    p: f64,
    lambda: f64,
    samples: usize,
    seed: u64,
    cfg: &VerifyConfig,
) -> Result<Report> {
    check_order(p)?;
    check_dim(a.dim(), b.dim())?;
    need_support(a, b)?;
    let dim = a.dim();
    let w = weight(lambda)?;
    let n = cfg.measure.resolution_for(dim);
    let order = ExtReal::Finite(p);
    let grid = coord_combine(
        &CombinationSpec::coord(a.clone(), b.clone(), w, PVector::uniform(order, dim)),
        n,
    )?;
    let dirs = directions::positive_octant(dim, direction_count(cfg, dim));
    let wulff = firey_combine(&CombinationSpec::firey(a.clone(), b.clone(), w, order), &dirs)?;
    let marked: Vec<usize> = (0..grid.marks().len()).filter(|i| grid.marks()[*i]).collect();
    if marked.is_empty() {
        return Err(Error::Degenerate("coordinate-wise combination has no marked cell".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let k = grid.unravel(marked[rng.random_range(0..marked.len())]);
            k.iter()
                .zip(grid.cell())
                .map(|(ki, h)| {
                    let x = ((*ki as f64 - 0.5) * h).max(0.0);
                    if rng.random::<bool>() {
                        -x
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let firey_support = |u: &[f64]| {
        let ha = a.support(u).unwrap_or(f64::INFINITY);
        let hb = b.support(u).unwrap_or(f64::INFINITY);
        p_mean(order, w, ha.max(0.0), hb.max(0.0)).unwrap_or(f64::NAN)
    };
    let unconditional = a.is_unconditional() && b.is_unconditional();
    let (in_wulff, in_exact) = points
        .par_iter()
        .map(|x| {
            (
                usize::from(wulff.contains(x)),
                usize::from(support_membership(x, unconditional, &firey_support)),
            )
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let mut report = Report::new(
        "check_inclusion",
        json!({
            "a": format!("{a:?}"),
            "b": format!("{b:?}"),
            "p": p,
            "lambda": lambda,
            "samples": samples,
            "seed": seed,
            "resolution": n,
            "directions": dirs.len(),
        }),
    );
    let total = Estimate::exact(samples as f64);
    for (label, inside) in [("inside Wulff shape", in_wulff), ("inside support inequality", in_exact)] {
        let verdict = if inside == samples { Verdict::Pass } else { Verdict::Fail };
        report.push(Row::decided(label, Estimate::exact(inside as f64), total, verdict));
    }
    Ok(report)
}

/// Hausdorff distance between the grid `+_(1,..,1)` combination and the
/// Minkowski combination, allowed up to two grid cells.
pub fn check_plus1_is_minkowski(a: &Body, b: &Body, lambda: f64, cfg: &VerifyConfig) -> Result<Report> {
    check_dim(a.dim(), b.dim())?;
    need_support(a, b)?;
    let dim = a.dim();
    let w = weight(lambda)?;
    let n = cfg.measure.resolution_for(dim);
    let grid: Body = coord_combine(
        &CombinationSpec::coord(a.clone(), b.clone(), w, PVector::uniform(ExtReal::ONE, dim)),
        n,
    )?
    .into();
    let cell = match &grid {
        Body::Grid(g) => g.cell().iter().copied().fold(0.0, f64::max),
        _ => unreachable!("coord_combine yields a grid"),
    };
    let sum = minkowski_combine(a, b, w)?;
    let dirs = directions::sphere(dim, if dim == 2 { 720 } else { 2000 });
    let distance = hausdorff_distance(&grid, &sum, &dirs)?;
    let allowance = 2.0 * cell;
    let mut report = Report::new(
        "check_plus1_is_minkowski",
        json!({
            "a": format!("{a:?}"),
            "b": format!("{b:?}"),
            "lambda": lambda,
            "resolution": n,
            "directions": dirs.len(),
        }),
    );
    let verdict = if distance <= allowance { Verdict::Pass } else { Verdict::Fail };
    report.push(Row::decided(
        "two-cell allowance vs distance",
        Estimate::exact(allowance),
        Estimate::exact(distance),
        verdict,
    ));
    Ok(report)
}

/// `mu((1 - l) A (+)_p l B) >= M_gamma^l(mu(A), mu(B))` with
/// `gamma = (n/p + 1/alpha)^{-1}`. The Firey body is realized as Wulff shapes
/// on two direction counts (outer bodies, so their measures are biased
/// upward) and bounded from inside by the coordinate-wise combination with
/// orders `(p, .., p)`. The inner row is the conservative one.
pub fn check_firey_corollary(
    a: &Body,
    b: &Body,
    density: &Density,
    p: f64,
    lambdas: &[f64],
    cfg: &VerifyConfig,
) -> Result<Vec<Report>> {
    check_order(p)?;
    let dim = density.dim();
    let orders = PVector::uniform(ExtReal::Finite(p), dim);
    check_inputs(&[a, b], density, &orders)?;
    need_support(a, b)?;
    check_lambdas(lambdas)?;
    let gamma = gamma_compose(&orders, density.alpha())?;
    let ma = Estimate::from(&measure(a, density, &cfg.measure)?);
    let mb = Estimate::from(&measure(b, density, &cfg.measure)?);
    let k = direction_count(cfg, dim);
    lambdas
        .iter()
        .map(|&l| {
            let w = weight(l)?;
            let firey = CombinationSpec::firey(a.clone(), b.clone(), w, ExtReal::Finite(p));
            let outer = |count: usize| -> Result<Estimate> {
                let body = firey_combine(&firey, &directions::positive_octant(dim, count))?;
                Ok(Estimate::from(&measure(&body, density, &cfg.measure)?))
            };
            let (outer_k, outer_2k) = (outer(k)?, outer(2 * k)?);
            let inner = grid_lhs(
                |n| {
                    let spec = CombinationSpec::coord(a.clone(), b.clone(), w, orders.clone());
                    Ok(coord_combine(&spec, n)?.into())
                },
                density,
                cfg,
            )?;
            let rhs = mean_with_error(gamma, w, ma, mb)?;
            let mut report = Report::new(
                "check_firey_corollary",
                json!({
                    "a": format!("{a:?}"),
                    "b": format!("{b:?}"),
                    "density": format!("{density:?}"),
                    "p": p,
                    "alpha": fmt_ext(density.alpha()),
                    "gamma": fmt_ext(gamma),
                    "lambda": l,
                    "directions": [k, 2 * k],
                    "resolution": cfg.measure.resolution_for(dim),
                }),
            );
            report.push(cfg.row(format!("outer, {k} directions"), outer_k, rhs));
            report.push(cfg.row(format!("outer, {} directions", 2 * k), outer_2k, rhs));
            report.push(cfg.row("inner, coordinate-wise lower bound", inner, rhs));
            let slack = outer_k.abs_error + outer_2k.abs_error;
            if outer_2k.value > outer_k.value + cfg.tolerance_factor * slack {
                report.note("outer estimates grew with more directions");
                report.downgrade(Verdict::Fail);
            }
            Ok(report)
        })
        .collect()
}
