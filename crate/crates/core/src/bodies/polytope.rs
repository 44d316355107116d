use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{dot, norm, solve};

/// How the listed halfspaces are closed under reflections.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// Every coordinate sign flip of each normal is added.
    #[default]
    Unconditional,
    /// Only `-u` is added for each normal `u`.
    Central,
}

/// `{x : <x, u_j> <= c_j}` closed under the chosen symmetry, `c_j > 0`.
#[derive(Clone, Debug)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    symmetry: Symmetry,
    vertices: Vec<Vec<f64>>,
    out_radius: f64,
}

const SLACK: f64 = 1e-12;

impl HPolytope {
    pub fn new(halfspaces: Vec<(Vec<f64>, f64)>, symmetry: Symmetry) -> Result<Self> {
        let dim = halfspaces
            .first()
            .map(|(u, _)| u.len())
            .ok_or_else(|| domain("polytope needs at least one halfspace"))?;
        if dim == 0 || dim > 4 {
            return Err(domain(format!("polytope dimension {dim} outside 1..=4")));
        }
        for (j, (u, c)) in halfspaces.iter().enumerate() {
            if u.len() != dim {
                return Err(domain(format!("halfspace {j} has dimension {}", u.len())));
            }
            if !(*c > 0.0) || !c.is_finite() {
                return Err(domain(format!(
                    "halfspace {j} offset {c} must be positive so the origin is interior"
                )));
            }
            if !(norm(u) > 0.0) {
                return Err(domain(format!("halfspace {j} has a zero normal")));
            }
        }
        let (normals, offsets): (Vec<_>, Vec<_>) = halfspaces.into_iter().unzip();
        let mut poly = HPolytope {
            dim,
            normals,
            offsets,
            symmetry,
            vertices: Vec::new(),
            out_radius: 0.0,
        };
        poly.vertices = poly.enumerate_vertices();
        if poly.vertices.is_empty() || !poly.is_bounded() {
            return Err(domain("halfspaces do not bound a polytope"));
        }
        poly.out_radius = poly.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max);
        Ok(poly)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn halfspaces(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.normals.iter().map(Vec::as_slice).zip(self.offsets.iter().copied())
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn out_radius(&self) -> f64 {
        self.out_radius
    }

    /// All constraints after applying the symmetry closure.
    fn expanded(&self) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::new();
        for (u, &c) in self.normals.iter().zip(&self.offsets) {
            match self.symmetry {
                Symmetry::Central => {
                    out.push((u.clone(), c));
                    out.push((u.iter().map(|v| -v).collect(), c));
                }
                Symmetry::Unconditional => {
                    for mask in 0..(1usize << self.dim) {
                        let flipped: Vec<f64> = u
                            .iter()
                            .enumerate()
                            .map(|(i, v)| if mask >> i & 1 == 1 { -v } else { *v })
                            .collect();
                        if !out.iter().any(|(w, d): &(Vec<f64>, f64)| *w == flipped && *d == c) {
                            out.push((flipped, c));
                        }
                    }
                }
            }
        }
        out
    }

    fn enumerate_vertices(&self) -> Vec<Vec<f64>> {
        let constraints = self.expanded();
        let n = self.dim;
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        let mut pick = (0..n).collect::<Vec<usize>>();
        let m = constraints.len();
        if m < n {
            return vertices;
        }
        loop {
            let a: Vec<Vec<f64>> = pick.iter().map(|&j| constraints[j].0.clone()).collect();
            let b: Vec<f64> = pick.iter().map(|&j| constraints[j].1).collect();
            if let Some(x) = solve(a, b) {
                if self.contains(&x) {
                    let scale = norm(&x).max(1.0);
                    let dup = vertices
                        .iter()
                        .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-10 * scale));
                    if !dup {
                        vertices.push(x);
                    }
                }
            }
            // next combination in lexicographic order
            let mut i = n;
            while i > 0 && pick[i - 1] == m - n + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            pick[i - 1] += 1;
            for k in i..n {
                pick[k] = pick[k - 1] + 1;
            }
        }
        vertices
    }

    /// Every axis direction must be cut by some constraint in both senses.
    fn is_bounded(&self) -> bool {
        let constraints = self.expanded();
        (0..self.dim).all(|axis| {
            [1.0, -1.0].iter().all(|&sign| {
                // a ray along sign * e_axis leaves the set iff some normal has
                // a positive component along it
                constraints.iter().any(|(u, _)| sign * u[axis] > 0.0)
            })
        }) && self.spans_all_directions(&constraints)
    }

    /// Coarse check that no direction escapes: every probe direction has a
    /// constraint with positive inner product.
    fn spans_all_directions(&self, constraints: &[(Vec<f64>, f64)]) -> bool {
        let probes = super::directions::sphere(self.dim, 512);
        probes
            .iter()
            .all(|d| constraints.iter().any(|(u, _)| dot(u, d) > 1e-9))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(u, &c)| {
            let value = match self.symmetry {
                Symmetry::Unconditional => u.iter().zip(x).map(|(a, b)| a.abs() * b.abs()).sum(),
                Symmetry::Central => dot(u, x).abs(),
            };
            value <= c * (1.0 + SLACK) + SLACK
        })
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Closed-form reach along an axis for the unconditional closure.
    pub(crate) fn reach_unconditional(&self, base: &[f64], axis: usize) -> Option<f64> {
        debug_assert_eq!(self.symmetry, Symmetry::Unconditional);
        let mut best = f64::INFINITY;
        for (u, &c) in self.normals.iter().zip(&self.offsets) {
            let used: f64 = u
                .iter()
                .zip(base)
                .enumerate()
                .filter(|(i, _)| *i != axis)
                .map(|(_, (a, b))| a.abs() * b.abs())
                .sum();
            let rest = c - used;
            if rest < -SLACK * c.max(1.0) {
                return None;
            }
            if u[axis] != 0.0 {
                best = best.min(rest.max(0.0) / u[axis].abs());
            }
        }
        best.is_finite().then_some(best)
    }
}
