use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Density;
use crate::bodies::{Body, GridSet};
use crate::error::{check_dim, domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Grid,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
    /// Cells per axis for grids, sample count for Monte Carlo.
    pub resolution: usize,
    pub seed: Option<u64>,
}

impl MeasureEstimate {
    pub fn exact(value: f64) -> Self {
        MeasureEstimate {
            value,
            abs_error: 0.0,
            method: Method::Grid,
            resolution: 0,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    /// Cells per axis; `None` picks a default from the dimension.
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_mc_samples() -> usize {
    2_000_000
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            resolution: None,
            mc_samples: default_mc_samples(),
            seed: 0,
        }
    }
}

impl MeasureConfig {
    pub fn with_resolution(resolution: usize) -> Self {
        MeasureConfig {
            resolution: Some(resolution),
            ..Self::default()
        }
    }

    pub fn resolution_for(&self, dim: usize) -> usize {
        self.resolution.unwrap_or(match dim {
            1 => 4096,
            2 => 256,
            _ => 64,
        })
    }
}

/// Relative floor on grid error estimates, covering summation rounding.
const ROUNDING_FLOOR: f64 = 1e-12;

/// `mu(S)` by column integration (cell centers across, exact chord ends
/// along the last axis) over the positive octant times `2^n`
/// for unconditional inputs, over a full centered box otherwise, and by
/// Monte Carlo from dimension 4 on. Grid errors are the change under
/// halving the resolution; Monte Carlo errors are three standard errors.
pub fn measure(body: &Body, density: &Density, cfg: &MeasureConfig) -> Result<MeasureEstimate> {
    check_dim(density.dim(), body.dim())?;
    if body.is_degenerate() {
        return Ok(MeasureEstimate::exact(0.0));
    }
    let radius = body.out_radius();
    if !radius.is_finite() {
        return Err(domain("cannot measure an unbounded set"));
    }
    let dim = body.dim();
    let unconditional = body.is_unconditional() && density.is_unconditional();
    if let (Body::Grid(grid), true) = (body, unconditional) {
        return Ok(grid_measure(grid, density));
    }
    if dim >= 4 {
        return Ok(monte_carlo(body, density, cfg, unconditional));
    }
    let n = cfg.resolution_for(dim).max(2);
    let (fine, coarse) = if unconditional {
        let extent = body.positive_box();
        if extent.iter().any(|e| !e.is_finite()) {
            return Err(domain("cannot measure an unbounded set"));
        }
        let (fine, coarse) = rayon::join(
            || octant_columns(body, density, &extent, n),
            || octant_columns(body, density, &extent, n / 2),
        );
        (fine, coarse)
    } else {
        let extent = centered_box(body, radius);
        rayon::join(
            || chord_columns(body, density, &extent, n),
            || chord_columns(body, density, &extent, n / 2),
        )
    };
    Ok(MeasureEstimate {
        value: fine,
        abs_error: (fine - coarse).abs() + ROUNDING_FLOOR * fine.abs(),
        method: Method::Grid,
        resolution: n,
        seed: None,
    })
}

fn octant_factor(dim: usize) -> f64 {
    (1u64 << dim) as f64
}

/// Column sums along the last axis: one `reach` call per column fixes how
/// many cell centers of the column lie in the body.
fn octant_columns(body: &Body, density: &Density, extent: &[f64], n: usize) -> f64 {
    let dim = extent.len();
    let last = dim - 1;
    let h: Vec<f64> = extent.iter().map(|e| e / n as f64).collect();
    let columns = n.pow(last as u32);
    let lebesgue = density.is_lebesgue();
    let partial: Vec<f64> = (0..columns)
        .into_par_iter()
        .map(|c| {
            let mut point = vec![0.0; dim];
            let mut rest = c;
            for i in 0..last {
                point[i] = ((rest % n) as f64 + 0.5) * h[i];
                rest /= n;
            }
            let Some(top) = body.reach(&point, last) else {
                return 0.0;
            };
            segment_sum(density, lebesgue, &mut point, 0.0, top.min(extent[last]), 0.0, h[last], n)
        })
        .collect();
    partial.iter().sum::<f64>() * h.iter().product::<f64>() * octant_factor(dim)
}

/// Symmetric box containing the body, from the support function when there
/// is one. Symmetric so that the coordinate hyperplanes stay on cell faces.
fn centered_box(body: &Body, radius: f64) -> Vec<f64> {
    (0..body.dim())
        .map(|i| {
            let mut e = vec![0.0; body.dim()];
            e[i] = 1.0;
            let up = body.support(&e);
            e[i] = -1.0;
            match (up, body.support(&e)) {
                (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a.max(b).min(radius),
                _ => radius,
            }
        })
        .collect()
}

/// `int_lo^hi f` along the last axis of `point`, in units of the cell
/// length: cells of length `h` starting at `origin`, each covered part
/// weighted by its length and sampled at its midpoint.
#[allow(clippy::too_many_arguments)]
fn segment_sum(
    density: &Density,
    lebesgue: bool,
    point: &mut [f64],
    lo: f64,
    hi: f64,
    origin: f64,
    h: f64,
    n: usize,
) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    if lebesgue {
        return (hi - lo) / h;
    }
    let last = point.len() - 1;
    let first = (((lo - origin) / h).floor().max(0.0) as usize).min(n - 1);
    let end = (((hi - origin) / h).ceil().max(0.0) as usize).min(n);
    (first..end)
        .map(|k| {
            let a = (origin + k as f64 * h).max(lo);
            let b = (origin + (k + 1) as f64 * h).min(hi);
            if b <= a {
                return 0.0;
            }
            point[last] = 0.5 * (a + b);
            (b - a) / h * density.eval(point)
        })
        .sum()
}

/// Boundary of a convex body on the segment between an inside and an
/// outside parameter of the last axis.
fn bisect_boundary(body: &Body, point: &mut [f64], mut inside: f64, mut outside: f64) -> f64 {
    let last = point.len() - 1;
    for _ in 0..64 {
        let mid = 0.5 * (inside + outside);
        point[last] = mid;
        if body.contains(point) {
            inside = mid;
        } else {
            outside = mid;
        }
        if (outside - inside).abs() <= 1e-15 * inside.abs().max(outside.abs()).max(1e-300) {
            break;
        }
    }
    inside
}

/// Full-box integral by columns along the last axis. The chord of each
/// column is located from its cell centers and refined by bisection, so only
/// the other axes are sampled at cell centers.
fn chord_columns(body: &Body, density: &Density, extent: &[f64], n: usize) -> f64 {
    let dim = extent.len();
    let last = dim - 1;
    let h: Vec<f64> = extent.iter().map(|e| 2.0 * e / n as f64).collect();
    let columns = n.pow(last as u32);
    let lebesgue = density.is_lebesgue();
    let origin = -extent[last];
    let partial: Vec<f64> = (0..columns)
        .into_par_iter()
        .map(|c| {
            let mut point = vec![0.0; dim];
            let mut rest = c;
            for i in 0..last {
                point[i] = -extent[i] + ((rest % n) as f64 + 0.5) * h[i];
                rest /= n;
            }
            let center = |k: usize| origin + (k as f64 + 0.5) * h[last];
            let mut inside = (0..n).filter(|&k| {
                point[last] = center(k);
                body.contains(&point)
            });
            let Some(first) = inside.next() else {
                return 0.0;
            };
            let top = inside.last().unwrap_or(first);
            let lo = bisect_boundary(body, &mut point, center(first), center(first) - h[last]);
            let hi = bisect_boundary(body, &mut point, center(top), center(top) + h[last]);
            segment_sum(density, lebesgue, &mut point, lo, hi, origin, h[last], n)
        })
        .collect();
    partial.iter().sum::<f64>() * h.iter().product::<f64>()
}

fn grid_sum(grid: &GridSet, density: &Density) -> f64 {
    let n = grid.resolution();
    let slab = grid.marks().len() / n;
    let lebesgue = density.is_lebesgue();
    let partial: Vec<f64> = grid
        .marks()
        .par_chunks(slab)
        .enumerate()
        .map(|(s, marks)| {
            if lebesgue {
                return marks.iter().filter(|m| **m).count() as f64;
            }
            marks
                .iter()
                .enumerate()
                .filter(|(_, m)| **m)
                .map(|(i, _)| density.eval(&grid.center(&grid.unravel(s * slab + i))))
                .sum()
        })
        .collect();
    partial.iter().sum::<f64>() * grid.cell_volume() * octant_factor(grid.dim())
}

fn grid_measure(grid: &GridSet, density: &Density) -> MeasureEstimate {
    let value = grid_sum(grid, density);
    let coarse = grid.coarsen().map(|c| grid_sum(&c, density));
    let delta = coarse.map_or(value, |c| (value - c).abs());
    MeasureEstimate {
        value,
        abs_error: delta + ROUNDING_FLOOR * value.abs(),
        method: Method::Grid,
        resolution: grid.resolution(),
        seed: None,
    }
}

/// Sum of `f` over the centers of an `n^dim` grid with lower corner `lower`
/// and cell sizes `h`, in a fixed order: one partial sum per slab of the last
/// axis, added in slab order.
pub(crate) fn cell_sum(n: usize, lower: &[f64], h: &[f64], f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> f64 {
    let dim = lower.len();
    let per_slab = n.pow(dim as u32 - 1);
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut point = vec![0.0; dim];
            point[dim - 1] = lower[dim - 1] + (s as f64 + 0.5) * h[dim - 1];
            (0..per_slab)
                .map(|c| {
                    let mut rest = c;
                    for i in 0..dim - 1 {
                        point[i] = lower[i] + ((rest % n) as f64 + 0.5) * h[i];
                        rest /= n;
                    }
                    f(&point)
                })
                .sum()
        })
        .collect();
    partial.iter().sum()
}

/// `2^n` times the cell-center integral of an unconditional `f` over the
/// box `prod [0, extent_i]`.
pub(crate) fn integrate_octant_box(extent: &[f64], n: usize, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> f64 {
    let h: Vec<f64> = extent.iter().map(|e| e / n as f64).collect();
    let lower = vec![0.0; extent.len()];
    cell_sum(n, &lower, &h, f) * h.iter().product::<f64>() * octant_factor(extent.len())
}

const MC_CHUNK: usize = 1 << 16;

fn monte_carlo(body: &Body, density: &Density, cfg: &MeasureConfig, unconditional: bool) -> MeasureEstimate {
    let dim = body.dim();
    let (lower, upper, factor) = if unconditional {
        let upper = body.positive_box();
        (vec![0.0; dim], upper, octant_factor(dim))
    } else {
        let r = body.out_radius();
        (vec![-r; dim], vec![r; dim], 1.0)
    };
    let volume: f64 = lower.iter().zip(&upper).map(|(a, b)| b - a).product::<f64>() * factor;
    let total = cfg.mc_samples.max(2);
    let chunks = total.div_ceil(MC_CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(total - c * MC_CHUNK);
            let mut x = vec![0.0; dim];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for i in 0..dim {
                    x[i] = rng.random_range(lower[i]..upper[i]);
                }
                let v = if body.contains(&x) { density.eval(&x) } else { 0.0 };
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    let m = total as f64;
    let mean = s / m;
    let var = (s2 / m - mean * mean).max(0.0) * m / (m - 1.0);
    MeasureEstimate {
        value: volume * mean,
        abs_error: 3.0 * volume * (var / m).sqrt(),
        method: Method::MonteCarlo,
        resolution: total,
        seed: Some(cfg.seed),
    }
}
