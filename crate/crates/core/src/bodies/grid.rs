//! Positive-octant grid sets and the coordinate-wise `+_p` combination.
//!
//! An unconditional set is stored through its trace on the positive octant:
//! `N` half-open cells per axis over `[0, extent_i]`, a cell being marked
//! when its center belongs to the set. Marked cells are kept downward
//! closed, so the trace is a monotone staircase.

use std::fmt;

use rayon::prelude::*;

use super::{Body, CombinationKind, CombinationSpec};
use crate::error::{domain, Error, Result};
use crate::linalg::dot;
use crate::means::{p_mean, ExtReal, Weight};

pub struct GridSet {
    dim: usize,
    resolution: usize,
    cell: Vec<f64>,
    marks: Vec<bool>,
    frontier: Vec<Vec<f64>>,
    marked: usize,
    out_radius: f64,
}

impl fmt::Debug for GridSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSet")
            .field("dim", &self.dim)
            .field("resolution", &self.resolution)
            .field("cell", &self.cell)
            .field("marked", &self.marked)
            .finish()
    }
}

impl GridSet {
    /// Builds a grid set from raw marks, enforcing downward closure with one
    /// backward sweep per axis.
    pub fn from_marks(dim: usize, resolution: usize, cell: Vec<f64>, mut marks: Vec<bool>) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::Unsupported(format!(
                "grid sets support dimensions 1..=3, got {dim}"
            )));
        }
        if resolution == 0 || cell.len() != dim || cell.iter().any(|c| !(*c > 0.0)) {
            return Err(domain("grid needs a positive resolution and positive cell sizes"));
        }
        let len = resolution.pow(dim as u32);
        if marks.len() != len {
            return Err(domain(format!("expected {len} marks, got {}", marks.len())));
        }
        for axis in 0..dim {
            let stride = resolution.pow(axis as u32);
            for idx in (0..len).rev() {
                if marks[idx] && (idx / stride) % resolution > 0 {
                    marks[idx - stride] = true;
                }
            }
        }
        let mut grid = GridSet {
            dim,
            resolution,
            cell,
            marks,
            frontier: Vec::new(),
            marked: 0,
            out_radius: 0.0,
        };
        grid.marked = grid.marks.iter().filter(|m| **m).count();
        let mut out_radius: f64 = 0.0;
        for idx in 0..len {
            if !grid.marks[idx] {
                continue;
            }
            let k = grid.unravel(idx);
            let maximal = (0..dim).any(|axis| {
                k[axis] + 1 == resolution || !grid.marks[idx + resolution.pow(axis as u32)]
            });
            if maximal {
                let corner: f64 = k
                    .iter()
                    .zip(&grid.cell)
                    .map(|(ki, h)| ((*ki as f64 + 1.0) * h).powi(2))
                    .sum::<f64>()
                    .sqrt();
                out_radius = out_radius.max(corner);
                grid.frontier.push(grid.center(&k));
            }
        }
        grid.out_radius = out_radius;
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Cell edge length per axis.
    pub fn cell(&self) -> &[f64] {
        &self.cell
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell.iter().product()
    }

    pub fn marks(&self) -> &[bool] {
        &self.marks
    }

    pub fn marked_count(&self) -> usize {
        self.marked
    }

    /// Lebesgue measure of the unconditional set: marked cells in all `2^n` octants.
    pub fn lebesgue_volume(&self) -> f64 {
        self.marked as f64 * self.cell_volume() * (1u64 << self.dim) as f64
    }

    /// Centers of the maximal marked cells.
    pub fn frontier(&self) -> &[Vec<f64>] {
        &self.frontier
    }

    pub fn out_radius(&self) -> f64 {
        self.out_radius
    }

    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        (0..self.dim)
            .map(|_| {
                let k = idx % self.resolution;
                idx /= self.resolution;
                k
            })
            .collect()
    }

    pub fn ravel(&self, k: &[usize]) -> usize {
        k.iter().rev().fold(0, |acc, ki| acc * self.resolution + ki)
    }

    pub fn center(&self, k: &[usize]) -> Vec<f64> {
        k.iter().zip(&self.cell).map(|(ki, h)| (*ki as f64 + 0.5) * h).collect()
    }

    fn cell_of(&self, x: &[f64]) -> Option<Vec<usize>> {
        x.iter()
            .zip(&self.cell)
            .map(|(v, h)| {
                let k = (v.abs() / h).floor();
                (k < self.resolution as f64).then_some(k as usize)
            })
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.cell_of(x).is_some_and(|k| self.marks[self.ravel(&k)])
    }

    /// Max of `<c, |u|>` over the centers of maximal cells.
    pub fn support(&self, u: &[f64]) -> f64 {
        let abs_u: Vec<f64> = u.iter().map(|v| v.abs()).collect();
        self.frontier.iter().map(|c| dot(c, &abs_u)).fold(0.0, f64::max)
    }

    /// Reach to the center of the topmost marked cell of the column through
    /// `base`; centers are the points known to lie in the underlying set.
    pub(crate) fn reach(&self, base: &[f64], axis: usize) -> Option<f64> {
        let mut probe = base.to_vec();
        probe[axis] = 0.0;
        let mut k = self.cell_of(&probe)?;
        if !self.marks[self.ravel(&k)] {
            return None;
        }
        while k[axis] + 1 < self.resolution {
            k[axis] += 1;
            if !self.marks[self.ravel(&k)] {
                k[axis] -= 1;
                break;
            }
        }
        Some((k[axis] as f64 + 0.5) * self.cell[axis])
    }

    /// The same set at half the resolution: a coarse cell is marked when its
    /// center, which sits on the corner of the upper fine child, is marked.
    pub fn coarsen(&self) -> Option<GridSet> {
        if self.resolution < 2 || self.resolution % 2 != 0 {
            return None;
        }
        let half = self.resolution / 2;
        let len = half.pow(self.dim as u32);
        let marks = (0..len)
            .map(|idx| {
                let mut rest = idx;
                let fine: Vec<usize> = (0..self.dim)
                    .map(|_| {
                        let j = rest % half;
                        rest /= half;
                        2 * j + 1
                    })
                    .collect();
                self.marks[self.ravel(&fine)]
            })
            .collect();
        let cell = self.cell.iter().map(|h| 2.0 * h).collect();
        GridSet::from_marks(self.dim, half, cell, marks).ok()
    }
}

/// Per-coordinate evaluation of `M_p^lambda`, split into a forward transform
/// applied once per frontier point and a cheap combination per pair.
#[derive(Clone, Copy, Debug)]
pub(crate) enum MeanKernel {
    First,
    Second,
    Min,
    Max,
    Log { l: f64 },
    Power { p: f64, l: f64 },
    Direct { p: f64, l: Weight },
}

impl MeanKernel {
    pub(crate) fn new(p: ExtReal, lambda: Weight) -> Self {
        let l = lambda.value();
        if l == 0.0 {
            return MeanKernel::First;
        }
        if l == 1.0 {
            return MeanKernel::Second;
        }
        match p {
            ExtReal::NegInf => MeanKernel::Min,
            ExtReal::PosInf => MeanKernel::Max,
            ExtReal::Finite(p) if p == 0.0 => MeanKernel::Log { l },
            ExtReal::Finite(p) if p.abs() < 1e-6 => MeanKernel::Direct { p, l: lambda },
            ExtReal::Finite(p) => MeanKernel::Power { p, l },
        }
    }

    pub(crate) fn forward(self, a: f64) -> f64 {
        match self {
            MeanKernel::Log { .. } => a.ln(),
            MeanKernel::Power { p, .. } => a.powf(p),
            _ => a,
        }
    }

    pub(crate) fn combine(self, ta: f64, tb: f64) -> f64 {
        match self {
            MeanKernel::First => ta,
            MeanKernel::Second => tb,
            MeanKernel::Min => ta.min(tb),
            MeanKernel::Max => ta.max(tb),
            MeanKernel::Log { l } => ((1.0 - l) * ta + l * tb).exp(),
            MeanKernel::Power { p, l } => {
                let s = (1.0 - l) * ta + l * tb;
                if s.is_infinite() && p < 0.0 {
                    0.0
                } else {
                    s.powf(1.0 / p)
                }
            }
            MeanKernel::Direct { p, l } => {
                p_mean(ExtReal::Finite(p), l, ta, tb).expect("non-negative frontier coordinates")
            }
        }
    }

    /// The combination before the inverse transform; `combine` applies
    /// that transform to this value.
    pub(crate) fn combine_raw(self, ta: f64, tb: f64) -> f64 {
        match self {
            MeanKernel::Log { l } | MeanKernel::Power { l, .. } => (1.0 - l) * ta + l * tb,
            _ => self.combine(ta, tb),
        }
    }

    /// The raw value whose inverse transform is `z`.
    pub(crate) fn raw_threshold(self, z: f64) -> f64 {
        match self {
            MeanKernel::Log { .. } => z.ln(),
            MeanKernel::Power { p, .. } => z.powf(p),
            _ => z,
        }
    }

    pub(crate) fn mean(self, a: f64, b: f64) -> f64 {
        self.combine(self.forward(a), self.forward(b))
    }
}

/// Samples the maximal points of the positive-octant trace of an
/// unconditional body. In 2D both axis sweeps are used so steep and flat
/// stretches of the boundary are covered; in 3D a height field over the
/// first two axes.
pub fn octant_frontier(body: &Body, samples: usize) -> Result<Vec<Vec<f64>>> {
    let dim = body.dim();
    let extent = body.positive_box();
    if extent.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Degenerate(format!(
            "body has empty positive-octant extent {extent:?}"
        )));
    }
    let samples = samples.max(2);
    let lin = |i: usize, k: usize| extent[i] * k as f64 / (samples - 1) as f64;
    let mut points = Vec::new();
    match dim {
        1 => points.push(vec![extent[0]]),
        2 => {
            for k in 0..samples {
                let x = lin(0, k);
                if let Some(s) = body.reach(&[x, 0.0], 1) {
                    points.push(vec![x, s]);
                }
                let y = lin(1, k);
                if let Some(s) = body.reach(&[0.0, y], 0) {
                    points.push(vec![s, y]);
                }
            }
        }
        3 => {
            for i in 0..samples {
                for j in 0..samples {
                    let (x, y) = (lin(0, i), lin(1, j));
                    if let Some(s) = body.reach(&[x, y, 0.0], 2) {
                        points.push(vec![x, y, s]);
                    }
                }
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "deterministic frontier sampling supports dimensions 1..=3, got {dim}"
            )))
        }
    }
    Ok(points)
}

fn default_frontier_samples(dim: usize, resolution: usize) -> usize {
    match dim {
        2 => 4 * resolution,
        _ => resolution,
    }
}

/// Grid construction of `(1 - lambda) A +_p lambda B` at `resolution` cells
/// per axis.
pub fn coord_combine(spec: &CombinationSpec, resolution: usize) -> Result<GridSet> {
    coord_combine_with(spec, resolution, default_frontier_samples(spec.a.dim(), resolution))
}

/// [`coord_combine`] with an explicit number of frontier samples per sweep.
///
/// The cell whose center is the largest one below an image point is marked
/// for every pair of frontier samples, then the marks are closed downward.
/// Since both frontier samples lie inside their operands, every marked
/// center lies inside the combination.
pub fn coord_combine_with(spec: &CombinationSpec, resolution: usize, frontier_samples: usize) -> Result<GridSet> {
    spec.validate()?;
    let CombinationKind::CoordPlusP(orders) = &spec.kind else {
        return Err(Error::Unsupported("coord_combine needs a +_p combination".into()));
    };
    let dim = spec.a.dim();
    if dim > 3 {
        return Err(Error::Unsupported(format!(
            "deterministic grid combination supports dimensions 1..=3, got {dim}"
        )));
    }
    if !spec.a.is_unconditional() || !spec.b.is_unconditional() {
        return Err(domain("coord_combine needs unconditional operands"));
    }
    if resolution < 2 {
        return Err(domain("resolution must be at least 2"));
    }
    let kernels: Vec<MeanKernel> = orders
        .as_slice()
        .iter()
        .map(|p| MeanKernel::new(*p, spec.lambda))
        .collect();
    let (box_a, box_b) = (spec.a.positive_box(), spec.b.positive_box());
    let extent: Vec<f64> = (0..dim).map(|i| kernels[i].mean(box_a[i], box_b[i])).collect();
    if extent.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::Degenerate(format!("combination has extent {extent:?}")));
    }
    let cell: Vec<f64> = extent.iter().map(|e| e / resolution as f64).collect();

    let transform = |points: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        points
            .into_iter()
            .map(|x| x.iter().zip(&kernels).map(|(v, k)| k.forward(*v)).collect())
            .collect()
    };
    let (raw_a, raw_b) = (octant_frontier(&spec.a, frontier_samples)?, octant_frontier(&spec.b, frontier_samples)?);
    let marks = if dim == 2 {
        let chain = |raw| -> Vec<[f64; 2]> {
            pareto_chain(raw)
                .into_iter()
                .map(|x| [kernels[0].forward(x[0]), kernels[1].forward(x[1])])
                .collect()
        };
        mark_plane(&kernels, &cell, resolution, chain(raw_a), &chain(raw_b))
    } else {
        mark_pairs(&kernels, &cell, resolution, &transform(raw_a), &transform(raw_b))
    };
    GridSet::from_marks(dim, resolution, cell, marks)
}

/// Marks the cell below every pairwise image by direct evaluation.
fn mark_pairs(kernels: &[MeanKernel], cell: &[f64], resolution: usize, front_a: &[Vec<f64>], front_b: &[Vec<f64>]) -> Vec<bool> {
    let dim = kernels.len();
    let len = resolution.pow(dim as u32);
    let top = resolution - 1;
    front_a
        .par_chunks(32)
        .fold(
            || vec![false; len],
            |mut marks, chunk| {
                let mut k = vec![0usize; dim];
                for ta in chunk {
                    'pairs: for tb in front_b {
                        for i in 0..dim {
                            let z = kernels[i].combine(ta[i], tb[i]);
                            let pos = (z / cell[i] - 0.5).floor();
                            if !(pos >= 0.0) {
                                continue 'pairs;
                            }
                            k[i] = (pos as usize).min(top);
                        }
                        let idx = k.iter().rev().fold(0, |acc, ki| acc * resolution + ki);
                        marks[idx] = true;
                    }
                }
                marks
            },
        )
        .reduce(
            || vec![false; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
                a
            },
        )
}

/// Maximal points of a planar point set, ordered by increasing first
/// coordinate (so strictly decreasing second coordinate). Dominated points
/// only produce dominated images since every mean is monotone in each
/// argument; this holds before the forward transform, which reverses order
/// for negative orders.
fn pareto_chain(mut points: Vec<Vec<f64>>) -> Vec<[f64; 2]> {
    points.sort_by(|p, q| q[0].total_cmp(&p[0]).then(q[1].total_cmp(&p[1])));
    let mut chain: Vec<[f64; 2]> = Vec::with_capacity(points.len());
    for p in points {
        if chain.last().is_none_or(|last| p[1] > last[1]) {
            chain.push([p[0], p[1]]);
        }
    }
    chain.reverse();
    chain
}

/// Cell-center thresholds on one axis, mapped into the kernel's raw
/// combination space with an increasing key.
struct AxisThresholds {
    kernel: MeanKernel,
    keys: Vec<f64>,
    negate: bool,
}

impl AxisThresholds {
    fn new(kernel: MeanKernel, cell: f64, resolution: usize) -> Self {
        let negate = matches!(kernel, MeanKernel::Power { p, .. } if p < 0.0);
        let keys = (0..resolution)
            .map(|i| {
                let raw = kernel.raw_threshold((i as f64 + 0.5) * cell);
                if negate {
                    -raw
                } else {
                    raw
                }
            })
            .collect();
        AxisThresholds { kernel, keys, negate }
    }

    fn key(&self, ta: f64, tb: f64) -> f64 {
        let raw = self.kernel.combine_raw(ta, tb);
        if self.negate {
            -raw
        } else {
            raw
        }
    }

    /// Number of cell centers at or below the combined coordinate, moving
    /// `count` from its previous value.
    fn advance(&self, count: &mut usize, key: f64) {
        while *count < self.keys.len() && self.keys[*count] <= key {
            *count += 1;
        }
        while *count > 0 && self.keys[*count - 1] > key {
            *count -= 1;
        }
    }
}

/// Planar marking: along the chain of `B` the combined first coordinate
/// increases and the second decreases, so each cell index follows a
/// pointer. Only the highest marked row per column is kept before the
/// downward closure.
fn mark_plane(kernels: &[MeanKernel], cell: &[f64], resolution: usize, front_a: Vec<[f64; 2]>, front_b: &[[f64; 2]]) -> Vec<bool> {
    let axes = [
        AxisThresholds::new(kernels[0], cell[0], resolution),
        AxisThresholds::new(kernels[1], cell[1], resolution),
    ];
    let heights = front_a
        .par_chunks(32)
        .fold(
            || vec![0usize; resolution],
            |mut heights, chunk| {
                for ta in chunk {
                    let (mut cx, mut cy) = (0, resolution);
                    for tb in front_b {
                        axes[0].advance(&mut cx, axes[0].key(ta[0], tb[0]));
                        axes[1].advance(&mut cy, axes[1].key(ta[1], tb[1]));
                        if cx > 0 && cy > heights[cx - 1] {
                            heights[cx - 1] = cy;
                        }
                    }
                }
                heights
            },
        )
        .reduce(
            || vec![0usize; resolution],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x = (*x).max(y));
                a
            },
        );
    let mut marks = vec![false; resolution * resolution];
    let mut reach = 0;
    for i in (0..resolution).rev() {
        reach = reach.max(heights[i]);
        for j in 0..reach {
            marks[j * resolution + i] = true;
        }
    }
    marks
}
