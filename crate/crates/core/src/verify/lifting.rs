use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

use super::{Estimate, Report, Row, Verdict};
use crate::certify::Potential;
use crate::error::{domain, Result};
use crate::linalg::norm;

/// `K_p = {(x, y) in R^n x R^p : |y| <= (1 - V(x)/p)_+}`.
#[derive(Clone)]
pub struct LiftedBody {
    potential: Arc<dyn Potential>,
    p: usize,
}

impl std::fmt::Debug for LiftedBody {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LiftedBody(n={}, p={})", self.potential.dim(), self.p)
    }
}

impl LiftedBody {
    pub fn new(potential: Arc<dyn Potential>, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(domain("lifting dimension p must be at least 1"));
        }
        Ok(LiftedBody { potential, p })
    }

    pub fn dim(&self) -> usize {
        self.potential.dim() + self.p
    }

    /// Radius of the `y`-section over `x`.
    pub fn height(&self, x: &[f64]) -> f64 {
        (1.0 - self.potential.value(x) / self.p as f64).max(0.0)
    }

    /// `(1 - V(x)/p)_+^p`, the section volume over that of the unit `p`-ball.
    pub fn projected(&self, x: &[f64]) -> f64 {
        self.height(x).powi(self.p as i32)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        let n = self.potential.dim();
        let (x, y) = point.split_at(n);
        norm(y) <= self.height(x) * (1.0 + 1e-12)
    }
}

#[derive(Clone, Debug)]
pub struct Lifting {
    pub body: LiftedBody,
    /// `sup |(1 - V/p)_+^p - e^{-V}|` over the grid.
    pub sup_distance: f64,
    pub argmax: Vec<f64>,
}

fn grid_points(half_extents: &[f64], per_axis: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
    let k = per_axis.max(2);
    (0..k.pow(half_extents.len() as u32)).map(move |idx| {
        let mut rest = idx;
        half_extents
            .iter()
            .map(|e| {
                let j = rest % k;
                rest /= k;
                -e + 2.0 * e * j as f64 / (k - 1) as f64
            })
            .collect()
    })
}

/// Sampled check that `V` is even and midpoint convex on the box.
fn check_convex_even(v: &dyn Potential, half_extents: &[f64]) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..1000 {
        let x: Vec<f64> = half_extents.iter().map(|e| rng.random_range(-e..=*e)).collect();
        let y: Vec<f64> = half_extents.iter().map(|e| rng.random_range(-e..=*e)).collect();
        let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let neg: Vec<f64> = x.iter().map(|a| -a).collect();
        let (vx, vy) = (v.value(&x), v.value(&y));
        let scale = 1.0 + vx.abs() + vy.abs();
        if v.value(&m) > 0.5 * (vx + vy) + 1e-9 * scale {
            return Err(domain(format!("potential is not convex between {x:?} and {y:?}")));
        }
        if (v.value(&neg) - vx).abs() > 1e-9 * scale {
            return Err(domain(format!("potential is not even at {x:?}")));
        }
    }
    Ok(())
}

/// The body `K_p` and the grid sup-distance between its normalized
/// projected density and `e^{-V}` on the box.
pub fn lift_to_uniform(v: Arc<dyn Potential>, p: usize, half_extents: &[f64], per_axis: usize) -> Result<Lifting> {
    crate::error::check_dim(v.dim(), half_extents.len())?;
    if half_extents.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(domain("domain box half extents must be positive and finite"));
    }
    check_convex_even(v.as_ref(), half_extents)?;
    let body = LiftedBody::new(v.clone(), p)?;
    let (mut sup_distance, mut argmax) = (0.0, vec![0.0; half_extents.len()]);
    for x in grid_points(half_extents, per_axis) {
        let d = (body.projected(&x) - (-v.value(&x)).exp()).abs();
        if d > sup_distance {
            sup_distance = d;
            argmax = x;
        }
    }
    Ok(Lifting {
        body,
        sup_distance,
        argmax,
    })
}

/// Strict decrease of the lifting distance along `ps`, a final distance
/// below `final_bound`, and sampled midpoint convexity of `K_p` for the
/// smallest `p`.
pub fn check_lifting(
    v: Arc<dyn Potential>,
    ps: &[usize],
    half_extents: &[f64],
    per_axis: usize,
    final_bound: f64,
    convexity_samples: usize,
    seed: u64,
) -> Result<Report> {
    if ps.is_empty() || ps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("lifting dimensions must be increasing"));
    }
    let liftings = ps
        .iter()
        .map(|p| lift_to_uniform(v.clone(), *p, half_extents, per_axis))
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::new(
        "lift_to_uniform",
        json!({
            "potential_dim": v.dim(),
            "ps": ps,
            "half_extents": half_extents,
            "grid_per_axis": per_axis,
            "final_bound": final_bound,
            "convexity_samples": convexity_samples,
            "seed": seed,
        }),
    );
    for (prev, (cur, p)) in liftings.iter().zip(liftings.iter().zip(ps).skip(1)) {
        let (a, b) = (prev.sup_distance, cur.sup_distance);
        let verdict = if b < a { Verdict::Pass } else { Verdict::Fail };
        report.push(Row::decided(format!("distance decreases at p={p}"), Estimate::exact(a), Estimate::exact(b), verdict));
    }
    let last = liftings.last().expect("non-empty").sup_distance;
    let verdict = if last < final_bound { Verdict::Pass } else { Verdict::Fail };
    report.push(Row::decided(
        format!("final distance below {final_bound}"),
        Estimate::exact(final_bound),
        Estimate::exact(last),
        verdict,
    ));

    let body = &liftings[0].body;
    let n = v.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let x: Vec<f64> = half_extents.iter().map(|e| rng.random_range(-e..=*e)).collect();
            let r = body.height(&x);
            if r <= 0.0 {
                continue;
            }
            let u: Vec<f64> = (0..body.p).map(|_| StandardNormal.sample(rng)).collect();
            let scale = r * rng.random::<f64>().powf(1.0 / body.p as f64) / norm(&u);
            let mut point = x;
            point.extend(u.iter().map(|c| c * scale));
            break point;
        }
    };
    let mut violations = 0;
    for _ in 0..convexity_samples {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let mid: Vec<f64> = a.iter().zip(&b).map(|(s, t)| 0.5 * (s + t)).collect();
        if !body.contains(&mid) {
            violations += 1;
        }
    }
    let verdict = if violations == 0 { Verdict::Pass } else { Verdict::Fail };
    report.push(Row::decided(
        format!("midpoint convexity of K_{} in R^{}", body.p, n + body.p),
        Estimate::exact((convexity_samples - violations) as f64),
        Estimate::exact(convexity_samples as f64),
        verdict,
    ));
    Ok(report)
}
