use rayon::prelude::*;
use serde_json::json;

use super::{fmt_ext, mean_with_error, weight, Estimate, Report, VerifyConfig};
use crate::bodies::MeanKernel;
use crate::error::{check_dim, domain, Error, Result};
use crate::means::{gamma_compose, ExtReal, PVector};
use crate::measures::Density;

struct Sampled {
    /// Centers and values of the cells where the function is positive.
    support: Vec<(Vec<f64>, f64)>,
    integral: f64,
}

fn sample(f: &Density, extent: &[f64], n: usize) -> Sampled {
    let dim = extent.len();
    let h: Vec<f64> = extent.iter().map(|e| e / n as f64).collect();
    let volume: f64 = h.iter().product::<f64>() * (1u64 << dim) as f64;
    let mut support = Vec::new();
    let mut sum = 0.0;
    for idx in 0..n.pow(dim as u32) {
        let mut rest = idx;
        let x: Vec<f64> = (0..dim)
            .map(|i| {
                let k = rest % n;
                rest /= n;
                (k as f64 + 0.5) * h[i]
            })
            .collect();
        let v = f.eval(&x);
        if v > 0.0 {
            sum += v;
            support.push((x, v));
        }
    }
    Sampled {
        support,
        integral: sum * volume,
    }
}

/// Integrals of `f`, `g` and of the smallest grid function `h` with
/// `h(cell of z) >= M_alpha^l(f(x), g(y))` for every pair of cell centers,
/// `z` being the coordinate-wise combination of `x` and `y`.
fn sup_convolution(
    f: &Density,
    g: &Density,
    alpha: ExtReal,
    p: &PVector,
    lambda: f64,
    n: usize,
) -> Result<(f64, f64, f64)> {
    let dim = f.dim();
    let (Some(ext_f), Some(ext_g)) = (f.tail_box(), g.tail_box()) else {
        return Err(domain("both functions need bounded (or truncated) support"));
    };
    let w = weight(lambda)?;
    let coords: Vec<MeanKernel> = p.as_slice().iter().map(|pi| MeanKernel::new(*pi, w)).collect();
    let value = MeanKernel::new(alpha, w);
    let ext_h: Vec<f64> = (0..dim).map(|i| coords[i].mean(ext_f[i], ext_g[i])).collect();
    if ext_h.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::Degenerate(format!("combined support has extent {ext_h:?}")));
    }
    let (sf, sg) = (sample(f, &ext_f, n), sample(g, &ext_g, n));
    if sf.support.is_empty() || sg.support.is_empty() {
        return Err(Error::Degenerate("empty effective support".into()));
    }
    let cell: Vec<f64> = ext_h.iter().map(|e| e / n as f64).collect();
    let forward = |s: &Sampled| -> Vec<(Vec<f64>, f64)> {
        s.support
            .iter()
            .map(|(x, v)| (x.iter().zip(&coords).map(|(c, k)| k.forward(*c)).collect(), value.forward(*v)))
            .collect()
    };
    let (tf, tg) = (forward(&sf), forward(&sg));
    let len = n.pow(dim as u32);
    let h = tf
        .par_chunks(16)
        .fold(
            || vec![0.0f64; len],
            |mut h, chunk| {
                for (x, fx) in chunk {
                    for (y, gy) in &tg {
                        let idx = (0..dim).rev().fold(0, |acc, i| {
                            let z = coords[i].combine(x[i], y[i]);
                            let k = ((z / cell[i]).floor().max(0.0) as usize).min(n - 1);
                            acc * n + k
                        });
                        let v = value.combine(*fx, *gy);
                        if v > h[idx] {
                            h[idx] = v;
                        }
                    }
                }
                h
            },
        )
        .reduce(
            || vec![0.0f64; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x = x.max(y));
                a
            },
        );
    let volume: f64 = cell.iter().product::<f64>() * (1u64 << dim) as f64;
    Ok((h.iter().sum::<f64>() * volume, sf.integral, sg.integral))
}

/// Grid size per axis used when the configuration leaves it open.
pub fn uhrin_default_resolution(dim: usize) -> usize {
    match dim {
        1 => 2048,
        2 => 64,
        _ => 12,
    }
}

/// Builds the minimal admissible `h` on a grid by sweeping the images of all
/// pairs of cells and checks `int h >= M_gamma^l(int f, int g)` with
/// `gamma = (sum_i 1/p_i + 1/alpha)^{-1}`.
pub fn uhrin_functional_check(
    f: &Density,
    g: &Density,
    alpha: ExtReal,
    p: &PVector,
    lambda: f64,
    cfg: &VerifyConfig,
) -> Result<Report> {
    check_dim(f.dim(), g.dim())?;
    check_dim(f.dim(), p.len())?;
    if !f.is_unconditional() || !g.is_unconditional() {
        return Err(domain("functions must be unconditional"));
    }
    let gamma = gamma_compose(p, alpha)?;
    let n = cfg.measure.resolution.unwrap_or_else(|| uhrin_default_resolution(f.dim())).max(2);
    let mut report = Report::new(
        "uhrin_functional_check",
        json!({
            "f": format!("{f:?}"),
            "g": format!("{g:?}"),
            "alpha": fmt_ext(alpha),
            "p": p.as_slice().iter().map(|x| fmt_ext(*x)).collect::<Vec<_>>(),
            "gamma": fmt_ext(gamma),
            "lambda": lambda,
            "resolution": n,
        }),
    );
    let fine = match sup_convolution(f, g, alpha, p, lambda, n) {
        Err(Error::Degenerate(msg)) => {
            report.note(format!("degenerate: {msg}"));
            return Ok(report);
        }
        other => other?,
    };
    let coarse = sup_convolution(f, g, alpha, p, lambda, n / 2)?;
    let lhs = Estimate::new(fine.0, (fine.0 - coarse.0).abs() + 1e-12 * fine.0);
    let ef = Estimate::new(fine.1, (fine.1 - coarse.1).abs() + 1e-12 * fine.1);
    let eg = Estimate::new(fine.2, (fine.2 - coarse.2).abs() + 1e-12 * fine.2);
    let rhs = mean_with_error(gamma, weight(lambda)?, ef, eg)?;
    report.push(cfg.row(format!("lambda={lambda}"), lhs, rhs));
    Ok(report)
}
