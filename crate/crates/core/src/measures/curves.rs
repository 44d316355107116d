use serde::{Deserialize, Serialize};

use super::integrate::integrate_octant_box;
use super::{measure, Density, MeasureConfig, MeasureEstimate, Method};
use crate::bodies::{dilate, Body};
use crate::error::{check_dim, domain, Error, Result};

/// How the curve parameter scales the body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveTransform {
    /// `t A`, `t >= 0`.
    DilateT,
    /// `t^{1/p} A`, `t > 0`.
    DilateTPow { p: f64 },
    /// `e^t A`.
    DilateExpT,
}

impl CurveTransform {
    pub fn factor(&self, t: f64) -> Result<f64> {
        match *self {
            CurveTransform::DilateT if t >= 0.0 => Ok(t),
            CurveTransform::DilateT => Err(domain(format!("dilation parameter must be >= 0, got {t}"))),
            CurveTransform::DilateTPow { p } if !(p > 0.0) => {
                Err(domain(format!("power dilation needs p > 0, got {p}")))
            }
            CurveTransform::DilateTPow { p } if t > 0.0 => Ok(t.powf(1.0 / p)),
            CurveTransform::DilateTPow { .. } => {
                Err(domain(format!("power dilation parameter must be > 0, got {t}")))
            }
            CurveTransform::DilateExpT => Ok(t.exp()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub estimate: MeasureEstimate,
}

fn check_sorted(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(domain("t grid must be finite and sorted"));
    }
    Ok(())
}

/// `t -> mu(phi(t) A)` on `t_grid`, every node at the same resolution.
pub fn measure_curve(
    body: &Body,
    density: &Density,
    transform: CurveTransform,
    t_grid: &[f64],
    cfg: &MeasureConfig,
) -> Result<Vec<CurvePoint>> {
    check_sorted(t_grid)?;
    let factors = t_grid
        .iter()
        .map(|t| transform.factor(*t))
        .collect::<Result<Vec<f64>>>()?;
    t_grid
        .iter()
        .zip(factors)
        .map(|(t, s)| {
            let estimate = measure(&dilate(body, s)?, density, cfg)?;
            Ok(CurvePoint { t: *t, estimate })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalCurve {
    pub points: Vec<CurvePoint>,
    /// Per node, the half extents of the integration box.
    pub truncation: Vec<Vec<f64>>,
}

/// `G(t) = int f(e^{-t} x) g(x) dx` on `t_grid`, integrated on the positive
/// octant over a box outside of which one factor is zero or negligible.
pub fn functional_b_curve(f: &Density, g: &Density, t_grid: &[f64], cfg: &MeasureConfig) -> Result<FunctionalCurve> {
    check_dim(f.dim(), g.dim())?;
    check_sorted(t_grid)?;
    if !f.is_unconditional() || !g.is_unconditional() {
        return Err(Error::Unsupported(
            "functional curves are integrated for unconditional functions only".into(),
        ));
    }
    if !f.is_integrable() && !g.is_integrable() {
        return Err(domain("integrand diverges: neither function has finite mass"));
    }
    let dim = f.dim();
    let n = cfg.resolution_for(dim).max(2);
    let mut points = Vec::with_capacity(t_grid.len());
    let mut truncation = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let scale = t.exp();
        let from_f = f
            .tail_box()
            .map(|b| b.into_iter().map(|v| v * scale).collect::<Vec<f64>>());
        let extent: Vec<f64> = match (from_f, g.tail_box()) {
            (Some(a), Some(b)) => a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect(),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(domain("integrand has no bounded truncation")),
        };
        let integrand = |x: &[f64]| {
            let shrunk: Vec<f64> = x.iter().map(|v| v / scale).collect();
            f.eval(&shrunk) * g.eval(x)
        };
        let fine = integrate_octant_box(&extent, n, &integrand);
        let coarse = integrate_octant_box(&extent, n / 2, &integrand);
        points.push(CurvePoint {
            t,
            estimate: MeasureEstimate {
                value: fine,
                abs_error: (fine - coarse).abs() + 1e-12 * fine.abs(),
                method: Method::Grid,
                resolution: n,
                seed: None,
            },
        });
        truncation.push(extent);
    }
    Ok(FunctionalCurve { points, truncation })
}
