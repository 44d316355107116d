//! Deterministic direction sets on the unit sphere.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::norm;

/// Default Firey direction count for a dimension.
pub fn default_count(dim: usize) -> usize {
    if dim == 2 {
        256
    } else {
        512
    }
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = GOLDEN_ANGLE * k as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn gaussian_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1ec + dim as u64);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = norm(&v);
            if n > 1e-9 {
                break v.into_iter().map(|x| x / n).collect();
            }
        })
        .collect()
}

fn axes(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Directions covering the whole sphere. Equiangular in 2D, a Fibonacci
/// lattice in 3D, seeded Gaussian directions above.
pub fn sphere(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(count),
        _ => gaussian_directions(dim, count),
    }
}

/// Directions in the closed positive octant, always including the axes.
/// Sufficient for unconditional bodies, whose support functions satisfy
/// `h(u) = h(|u|)`.
pub fn positive_octant(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0]],
        2 => {
            let count = count.max(2);
            (0..count)
                .map(|k| {
                    let t = FRAC_PI_2 * k as f64 / (count - 1) as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
        _ => {
            let mut dirs = axes(dim);
            let rest = count.saturating_sub(dim);
            let raw = if dim == 3 {
                fibonacci_sphere(rest)
            } else {
                gaussian_directions(dim, rest)
            };
            dirs.extend(raw.into_iter().map(|v| v.into_iter().map(f64::abs).collect()));
            dirs
        }
    }
}
