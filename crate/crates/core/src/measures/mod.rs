//! Unconditional alpha-concave densities and numerical measures of bodies.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{domain, Result};
use crate::means::{p_mean, ExtReal, Weight};

mod curves;
mod integrate;

pub use curves::{functional_b_curve, measure_curve, CurvePoint, CurveTransform, FunctionalCurve};
pub use integrate::{measure, MeasureConfig, MeasureEstimate, Method};

/// Densities below this fraction of their maximum are truncated away.
pub const TAIL_RATIO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityFamily {
    Lebesgue,
    Gaussian,
    PowerConvex,
    UniformOnBody,
    Custom,
}

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Lebesgue,
    Gaussian,
    PowerConvex { alpha: f64, beta: f64 },
    Uniform(Body),
    Restricted { base: Arc<Density>, body: Body },
    Custom {
        eval: EvalFn,
        alpha: ExtReal,
        unconditional: bool,
        bounds: Option<Vec<f64>>,
        label: String,
    },
}

/// A non-negative density on `R^dim` with a known concavity exponent.
#[derive(Clone)]
pub struct Density {
    dim: usize,
    kind: Kind,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Lebesgue => write!(f, "Lebesgue(n={})", self.dim),
            Kind::Gaussian => write!(f, "Gaussian(n={})", self.dim),
            Kind::PowerConvex { alpha, beta } => {
                write!(f, "PowerConvex(n={}, alpha={alpha}, beta={beta})", self.dim)
            }
            Kind::Uniform(body) => write!(f, "UniformOnBody({body:?})"),
            Kind::Restricted { base, body } => write!(f, "Restricted({base:?}, {body:?})"),
            Kind::Custom { label, alpha, .. } => write!(f, "Custom({label}, alpha={alpha})"),
        }
    }
}

impl Density {
    pub fn lebesgue(dim: usize) -> Self {
        Density {
            dim,
            kind: Kind::Lebesgue,
        }
    }

    /// Standard Gaussian density.
    pub fn gaussian(dim: usize) -> Self {
        Density {
            dim,
            kind: Kind::Gaussian,
        }
    }

    /// `(1 + beta * sum_i |x_i|)^{1/alpha}` with `alpha < 0`, `beta > 0`.
    pub fn power_convex(dim: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha < 0.0) || !alpha.is_finite() {
            return Err(domain(format!("power-convex density needs alpha < 0, got {alpha}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(domain(format!("power-convex density needs beta > 0, got {beta}")));
        }
        Ok(Density {
            dim,
            kind: Kind::PowerConvex { alpha, beta },
        })
    }

    /// Indicator of an unconditional convex body.
    pub fn uniform_on(body: Body) -> Result<Self> {
        if !body.is_unconditional() {
            return Err(domain("uniform density needs an unconditional body"));
        }
        Ok(Density {
            dim: body.dim(),
            kind: Kind::Uniform(body),
        })
    }

    /// `self` multiplied by the indicator of `body`.
    pub fn restrict(&self, body: Body) -> Result<Self> {
        crate::error::check_dim(self.dim, body.dim())?;
        Ok(Density {
            dim: self.dim,
            kind: Kind::Restricted {
                base: Arc::new(self.clone()),
                body,
            },
        })
    }

    /// A user-supplied density. `bounds`, when given, are per-axis half
    /// extents of a box holding the support.
    pub fn custom(
        dim: usize,
        label: impl Into<String>,
        alpha: ExtReal,
        unconditional: bool,
        bounds: Option<Vec<f64>>,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Density {
            dim,
            kind: Kind::Custom {
                eval: Arc::new(eval),
                alpha,
                unconditional,
                bounds,
                label: label.into(),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> DensityFamily {
        match &self.kind {
            Kind::Lebesgue => DensityFamily::Lebesgue,
            Kind::Gaussian => DensityFamily::Gaussian,
            Kind::PowerConvex { .. } => DensityFamily::PowerConvex,
            Kind::Uniform(_) => DensityFamily::UniformOnBody,
            Kind::Restricted { .. } | Kind::Custom { .. } => DensityFamily::Custom,
        }
    }

    /// Concavity exponent of the density.
    pub fn alpha(&self) -> ExtReal {
        match &self.kind {
            Kind::Lebesgue | Kind::Uniform(_) => ExtReal::PosInf,
            Kind::Gaussian => ExtReal::ZERO,
            Kind::PowerConvex { alpha, .. } => ExtReal::Finite(*alpha),
            Kind::Restricted { base, .. } => base.alpha(),
            Kind::Custom { alpha, .. } => *alpha,
        }
    }

    pub fn is_unconditional(&self) -> bool {
        match &self.kind {
            Kind::Restricted { base, body } => base.is_unconditional() && body.is_unconditional(),
            Kind::Custom { unconditional, .. } => *unconditional,
            _ => true,
        }
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self.kind, Kind::Lebesgue)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Lebesgue => 1.0,
            Kind::Gaussian => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                (-0.5 * r2).exp() / (2.0 * PI).powf(0.5 * self.dim as f64)
            }
            Kind::PowerConvex { alpha, beta } => {
                let s: f64 = x.iter().map(|v| v.abs()).sum();
                (1.0 + beta * s).powf(1.0 / alpha)
            }
            Kind::Uniform(body) => {
                if body.contains(x) {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Restricted { base, body } => {
                if body.contains(x) {
                    base.eval(x)
                } else {
                    0.0
                }
            }
            Kind::Custom { eval, .. } => eval(x),
        }
    }

    /// Potential `V = -ln(density)` in closed form, when available.
    pub fn potential(&self, x: &[f64]) -> Option<f64> {
        match &self.kind {
            Kind::Lebesgue => Some(0.0),
            Kind::Gaussian => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Some(0.5 * r2 + 0.5 * self.dim as f64 * (2.0 * PI).ln())
            }
            Kind::PowerConvex { alpha, beta } => {
                let s: f64 = x.iter().map(|v| v.abs()).sum();
                Some(-(1.0 + beta * s).ln() / alpha)
            }
            _ => None,
        }
    }

    /// Per-axis half extents outside of which the density is negligible
    /// (below `TAIL_RATIO` times its maximum) or zero; `None` when the
    /// density does not decay.
    pub fn tail_box(&self) -> Option<Vec<f64>> {
        match &self.kind {
            Kind::Lebesgue => None,
            Kind::Gaussian => Some(vec![(-2.0 * TAIL_RATIO.ln()).sqrt(); self.dim]),
            Kind::PowerConvex { alpha, beta } => {
                let s = (TAIL_RATIO.powf(*alpha) - 1.0) / beta;
                Some(vec![s; self.dim])
            }
            Kind::Uniform(body) => Some(body.positive_box()),
            Kind::Restricted { base, body } => {
                let own = body.positive_box();
                Some(match base.tail_box() {
                    Some(b) => own.iter().zip(b).map(|(x, y)| x.min(y)).collect(),
                    None => own,
                })
            }
            Kind::Custom { bounds, .. } => bounds.clone(),
        }
    }

    /// Whether the density has finite total mass.
    pub fn is_integrable(&self) -> bool {
        match &self.kind {
            Kind::Lebesgue => false,
            Kind::PowerConvex { alpha, .. } => 1.0 / alpha < -(self.dim as f64),
            Kind::Custom { bounds, .. } => bounds.is_some(),
            _ => true,
        }
    }
}

/// Serializable description of a built-in density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Lebesgue { dim: usize },
    Gaussian { dim: usize },
    PowerConvex { dim: usize, alpha: f64, beta: f64 },
}

impl DensitySpec {
    pub fn build(&self) -> Result<Density> {
        match *self {
            DensitySpec::Lebesgue { dim } => Ok(Density::lebesgue(dim)),
            DensitySpec::Gaussian { dim } => Ok(Density::gaussian(dim)),
            DensitySpec::PowerConvex { dim, alpha, beta } => Density::power_convex(dim, alpha, beta),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            DensitySpec::Lebesgue { dim }
            | DensitySpec::Gaussian { dim }
            | DensitySpec::PowerConvex { dim, .. } => dim,
        }
    }
}

/// Counts sampled violations of `f((1-l)x + l y) >= M_alpha^l(f(x), f(y))`
/// over `triples` random segments in `[-radius, radius]^n`, with a relative
/// tolerance of `1e-9`.
pub fn alpha_concavity_violations(density: &Density, triples: usize, radius: f64, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = density.alpha();
    let n = density.dim();
    let mut violations = 0;
    for _ in 0..triples {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
        let l = rng.random::<f64>();
        let (fx, fy) = (density.eval(&x), density.eval(&y));
        if fx * fy <= 0.0 {
            continue;
        }
        let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (1.0 - l) * a + l * b).collect();
        let lower = p_mean(alpha, Weight::new(l)?, fx, fy)?;
        if density.eval(&z) < lower * (1.0 - 1e-9) {
            violations += 1;
        }
    }
    Ok(violations)
}
