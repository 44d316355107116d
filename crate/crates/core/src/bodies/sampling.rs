use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Body;
use crate::error::{domain, Error, Result};
use crate::linalg::norm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Uniform in the body, by rejection from the enclosing ball.
    Interior,
    /// Points `x` inside with `(1 + 1e-6) x` outside, found by radial bisection.
    Boundary,
}

#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub points: Vec<Vec<f64>>,
    /// Number of proposals drawn, accepted or not.
    pub attempts: usize,
}

const BOUNDARY_EPS: f64 = 1e-6;

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn sample_points(body: &Body, count: usize, mode: SampleMode, seed: u64) -> Result<SampleBatch> {
    if body.is_degenerate() {
        return Err(domain("cannot sample a degenerate body"));
    }
    let dim = body.dim();
    let radius = body.out_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 1000 * count + 10_000;
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0;
    while points.len() < count {
        if attempts >= budget {
            return Err(Error::Sampling(format!(
                "accepted {} of {count} points after {attempts} proposals",
                points.len()
            )));
        }
        attempts += 1;
        let u = unit_vector(&mut rng, dim);
        match mode {
            SampleMode::Interior => {
                let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
                let x: Vec<f64> = u.iter().map(|v| v * r).collect();
                if body.contains(&x) {
                    points.push(x);
                }
            }
            SampleMode::Boundary => {
                if let Some(x) = radial_boundary(body, &u, radius) {
                    points.push(x);
                }
            }
        }
    }
    Ok(SampleBatch { points, attempts })
}

fn radial_boundary(body: &Body, u: &[f64], radius: f64) -> Option<Vec<f64>> {
    let at = |s: f64| -> Vec<f64> { u.iter().map(|v| v * s).collect() };
    let (mut lo, mut hi) = (0.0, radius * (1.0 + 1e-9) + 1e-300);
    if body.contains(&at(hi)) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if body.contains(&at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    let x = at(lo);
    let pushed = at(lo * (1.0 + BOUNDARY_EPS));
    (body.contains(&x) && !body.contains(&pushed)).then_some(x)
}
