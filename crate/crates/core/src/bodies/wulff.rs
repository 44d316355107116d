//! Wulff shapes `{x : <x, u_j> <= c_j}` over a finite direction set, used to
//! represent Firey combinations.

use std::fmt;

use super::{Body, CombinationKind, CombinationSpec};
use crate::error::{domain, Error, Result};
use crate::linalg::{dot, norm};
use crate::means::{p_mean, ExtReal, Weight};

pub struct WulffSet {
    dim: usize,
    directions: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    unconditional: bool,
    polygon: Option<Vec<[f64; 2]>>,
    out_radius: f64,
}

impl fmt::Debug for WulffSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WulffSet")
            .field("dim", &self.dim)
            .field("directions", &self.directions.len())
            .field("unconditional", &self.unconditional)
            .field("out_radius", &self.out_radius)
            .finish()
    }
}

const SLACK: f64 = 1e-12;

impl WulffSet {
    /// `bound` is the radius of a centered ball known to contain the shape.
    /// With `unconditional` set, directions are taken in the positive octant
    /// and membership is tested on `|x|`.
    pub fn new(directions: Vec<Vec<f64>>, offsets: Vec<f64>, unconditional: bool, bound: f64) -> Result<Self> {
        let dim = directions
            .first()
            .map(Vec::len)
            .ok_or_else(|| domain("Wulff shape needs at least one direction"))?;
        if directions.len() != offsets.len() {
            return Err(domain("one offset per direction is required"));
        }
        if directions.iter().any(|u| u.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: directions.iter().map(Vec::len).find(|l| *l != dim).unwrap_or(dim),
            });
        }
        if offsets.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return Err(domain("Wulff offsets must be finite and non-negative"));
        }
        if unconditional && directions.iter().flatten().any(|v| *v < 0.0) {
            return Err(domain("unconditional Wulff shapes take positive-octant directions"));
        }
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(domain("Wulff bound must be positive and finite"));
        }
        let mut set = WulffSet {
            dim,
            directions,
            offsets,
            unconditional,
            polygon: None,
            out_radius: bound * (dim as f64).sqrt(),
        };
        if dim == 2 {
            let polygon = set.clip_polygon(2.0 * bound * 2f64.sqrt());
            set.out_radius = polygon
                .iter()
                .map(|v| v[0].hypot(v[1]))
                .fold(0.0, f64::max);
            set.polygon = Some(polygon);
        } else if unconditional {
            let axis_bound: Vec<f64> = (0..dim)
                .map(|i| {
                    set.directions
                        .iter()
                        .zip(&set.offsets)
                        .filter(|(u, _)| u[i] > 0.0)
                        .map(|(u, c)| c / u[i])
                        .fold(bound, f64::min)
                })
                .collect();
            set.out_radius = set.out_radius.min(norm(&axis_bound));
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_unconditional(&self) -> bool {
        self.unconditional
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn out_radius(&self) -> f64 {
        self.out_radius
    }

    /// Vertices of the exact planar shape, counter-clockwise.
    pub fn polygon(&self) -> Option<&[[f64; 2]]> {
        self.polygon.as_deref()
    }

    /// Exact area in 2D.
    pub fn area(&self) -> Option<f64> {
        self.polygon.as_ref().map(|p| polygon_area(p))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let abs: Vec<f64>;
        let point = if self.unconditional {
            abs = x.iter().map(|v| v.abs()).collect();
            &abs
        } else {
            x
        };
        self.directions
            .iter()
            .zip(&self.offsets)
            .all(|(u, c)| dot(point, u) <= c * (1.0 + SLACK) + SLACK)
    }

    pub fn support(&self, u: &[f64]) -> Option<f64> {
        self.polygon.as_ref().map(|p| {
            p.iter()
                .map(|v| v[0] * u[0] + v[1] * u[1])
                .fold(f64::NEG_INFINITY, f64::max)
        })
    }

    /// Sutherland-Hodgman clipping of a square against every constraint.
    fn clip_polygon(&self, half_side: f64) -> Vec<[f64; 2]> {
        let b = half_side;
        let mut poly = vec![[-b, -b], [b, -b], [b, b], [-b, b]];
        let signs: &[[f64; 2]] = if self.unconditional {
            &[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]
        } else {
            &[[1.0, 1.0]]
        };
        for (u, &c) in self.directions.iter().zip(&self.offsets) {
            for s in signs {
                let n = [u[0] * s[0], u[1] * s[1]];
                poly = clip(&poly, n, c);
                if poly.is_empty() {
                    return poly;
                }
            }
        }
        poly
    }
}

fn clip(poly: &[[f64; 2]], n: [f64; 2], c: f64) -> Vec<[f64; 2]> {
    let value = |p: &[f64; 2]| n[0] * p[0] + n[1] * p[1] - c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fp, fq) = (value(&p), value(&q));
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

pub(crate) fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
        .abs()
}

/// Wulff shape with offsets `M_p^lambda(h_A(u), h_B(u))` over `directions`.
/// For unconditional operands the directions are folded into the positive
/// octant and the axes are added.
pub fn firey_combine(spec: &CombinationSpec, directions: &[Vec<f64>]) -> Result<Body> {
    spec.validate()?;
    let CombinationKind::FireyOPlusP(p) = spec.kind else {
        return Err(Error::Unsupported("firey_combine needs a (+)_p combination".into()));
    };
    let dim = spec.a.dim();
    let unconditional = spec.a.is_unconditional() && spec.b.is_unconditional();
    let mut dirs: Vec<Vec<f64>> = if unconditional {
        directions
            .iter()
            .map(|u| u.iter().map(|v| v.abs()).collect())
            .collect()
    } else {
        directions.to_vec()
    };
    if unconditional {
        for i in 0..dim {
            let axis: Vec<f64> = (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
            if !dirs.contains(&axis) {
                dirs.push(axis);
            }
        }
    }
    if dirs.iter().any(|u| u.len() != dim) {
        return Err(domain("direction dimension does not match the operands"));
    }
    let offsets = dirs
        .iter()
        .map(|u| {
            let (Some(ha), Some(hb)) = (spec.a.support(u), spec.b.support(u)) else {
                return Err(Error::Unsupported(
                    "Firey combination needs support oracles on both operands".into(),
                ));
            };
            firey_offset(p, spec.lambda, ha, hb)
        })
        .collect::<Result<Vec<f64>>>()?;
    let bound = spec.a.out_radius().max(spec.b.out_radius()) * (1.0 + 1e-9);
    Ok(WulffSet::new(dirs, offsets, unconditional, bound)?.into())
}

fn firey_offset(p: ExtReal, lambda: Weight, ha: f64, hb: f64) -> Result<f64> {
    p_mean(p, lambda, ha.max(0.0), hb.max(0.0))
}
