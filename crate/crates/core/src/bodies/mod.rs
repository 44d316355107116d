//! Convex bodies given by membership and support oracles, and the three
//! ways of combining two of them: the coordinate-wise `+_p` combination,
//! the Firey `(+)_p` combination and the Minkowski sum.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};
use crate::linalg::{dot, norm};
use crate::means::{ExtReal, PVector, Weight};

pub mod directions;
mod grid;
mod lq_ball;
mod polytope;
mod sampling;
mod spec;
mod wulff;

pub use grid::{coord_combine, coord_combine_with, octant_frontier, GridSet};
pub(crate) use grid::MeanKernel;
pub use lq_ball::LqBall;
pub use polytope::{HPolytope, Symmetry};
pub use sampling::{sample_points, SampleBatch, SampleMode};
pub use spec::{BodySpec, HalfspaceSpec};
pub use wulff::{firey_combine, WulffSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    LqBall,
    HPolytope,
    GridSet,
    WulffSet,
    Dilate,
    Sum,
}

/// A convex body (or a grid approximation of one) containing the origin.
#[derive(Clone)]
pub enum Body {
    LqBall(LqBall),
    HPolytope(Arc<HPolytope>),
    Grid(Arc<GridSet>),
    Wulff(Arc<WulffSet>),
    Dilate { inner: Arc<Body>, t: f64 },
    Sum(Arc<MinkowskiSum>),
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::LqBall(b) => write!(f, "LqBall(q={}, r={:?})", b.q(), b.radii()),
            Body::HPolytope(p) => write!(f, "HPolytope({} vertices)", p.vertices().len()),
            Body::Grid(g) => write!(f, "{g:?}"),
            Body::Wulff(w) => write!(f, "{w:?}"),
            Body::Dilate { inner, t } => write!(f, "Dilate({t}, {inner:?})"),
            Body::Sum(s) => write!(f, "Sum(lambda={}, {:?}, {:?})", s.lambda.value(), s.a, s.b),
        }
    }
}

/// `(1 - lambda) A + lambda B` through its support function.
#[derive(Clone, Debug)]
pub struct MinkowskiSum {
    pub a: Body,
    pub b: Body,
    pub lambda: Weight,
}

impl MinkowskiSum {
    fn support(&self, u: &[f64]) -> Option<f64> {
        let l = self.lambda.value();
        Some((1.0 - l) * self.a.support(u)? + l * self.b.support(u)?)
    }
}

impl From<LqBall> for Body {
    fn from(b: LqBall) -> Self {
        Body::LqBall(b)
    }
}

impl From<HPolytope> for Body {
    fn from(p: HPolytope) -> Self {
        Body::HPolytope(Arc::new(p))
    }
}

impl From<GridSet> for Body {
    fn from(g: GridSet) -> Self {
        Body::Grid(Arc::new(g))
    }
}

impl From<WulffSet> for Body {
    fn from(w: WulffSet) -> Self {
        Body::Wulff(Arc::new(w))
    }
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::LqBall(b) => b.dim(),
            Body::HPolytope(p) => p.dim(),
            Body::Grid(g) => g.dim(),
            Body::Wulff(w) => w.dim(),
            Body::Dilate { inner, .. } => inner.dim(),
            Body::Sum(s) => s.a.dim(),
        }
    }

    pub fn family(&self) -> FamilyTag {
        match self {
            Body::LqBall(_) => FamilyTag::LqBall,
            Body::HPolytope(_) => FamilyTag::HPolytope,
            Body::Grid(_) => FamilyTag::GridSet,
            Body::Wulff(_) => FamilyTag::WulffSet,
            Body::Dilate { .. } => FamilyTag::Dilate,
            Body::Sum(_) => FamilyTag::Sum,
        }
    }

    /// Invariant under every coordinate sign flip.
    pub fn is_unconditional(&self) -> bool {
        match self {
            Body::LqBall(_) | Body::Grid(_) => true,
            Body::HPolytope(p) => p.symmetry() == Symmetry::Unconditional,
            Body::Wulff(w) => w.is_unconditional(),
            Body::Dilate { inner, .. } => inner.is_unconditional(),
            Body::Sum(s) => s.a.is_unconditional() && s.b.is_unconditional(),
        }
    }

    /// The degenerate dilate by zero (a single point).
    pub fn is_degenerate(&self) -> bool {
        match self {
            Body::Dilate { inner, t } => *t == 0.0 || inner.is_degenerate(),
            _ => false,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Body::LqBall(b) => b.contains(x),
            Body::HPolytope(p) => p.contains(x),
            Body::Grid(g) => g.contains(x),
            Body::Wulff(w) => w.contains(x),
            Body::Dilate { inner, t } => {
                if *t == 0.0 {
                    x.iter().all(|v| *v == 0.0)
                } else {
                    let scaled: Vec<f64> = x.iter().map(|v| v / t).collect();
                    inner.contains(&scaled)
                }
            }
            Body::Sum(s) => support_membership(x, self.is_unconditional(), |u| {
                s.support(u).unwrap_or(f64::INFINITY)
            }),
        }
    }

    /// `h(u) = max_{x in body} <x, u>`; `None` when the body has no support oracle.
    pub fn support(&self, u: &[f64]) -> Option<f64> {
        match self {
            Body::LqBall(b) => Some(b.support(u)),
            Body::HPolytope(p) => Some(p.support(u)),
            Body::Grid(g) => Some(g.support(u)),
            Body::Wulff(w) => w.support(u),
            Body::Dilate { inner, t } => inner.support(u).map(|h| t * h),
            Body::Sum(s) => s.support(u),
        }
    }

    pub fn has_support(&self) -> bool {
        let probe = vec![1.0 / (self.dim() as f64).sqrt(); self.dim()];
        self.support(&probe).is_some()
    }

    /// Radius of a centered ball containing the body.
    pub fn out_radius(&self) -> f64 {
        match self {
            Body::LqBall(b) => b.out_radius(),
            Body::HPolytope(p) => p.out_radius(),
            Body::Grid(g) => g.out_radius(),
            Body::Wulff(w) => w.out_radius(),
            Body::Dilate { inner, t } => t * inner.out_radius(),
            Body::Sum(s) => {
                let l = s.lambda.value();
                (1.0 - l) * s.a.out_radius() + l * s.b.out_radius()
            }
        }
    }

    /// `sup {s >= 0 : base + s e_axis in body}` with `base[axis]` treated as
    /// zero, or `None` if that base point is outside. Meant for the positive
    /// octant trace of unconditional bodies.
    pub fn reach(&self, base: &[f64], axis: usize) -> Option<f64> {
        match self {
            Body::LqBall(b) => b.reach(base, axis),
            Body::HPolytope(p) if p.symmetry() == Symmetry::Unconditional => {
                p.reach_unconditional(base, axis)
            }
            Body::Grid(g) => g.reach(base, axis),
            Body::Dilate { inner, t } => {
                if *t == 0.0 {
                    return base.iter().all(|v| *v == 0.0).then_some(0.0);
                }
                let scaled: Vec<f64> = base.iter().map(|v| v / t).collect();
                inner.reach(&scaled, axis).map(|s| s * t)
            }
            _ => self.reach_by_bisection(base, axis),
        }
    }

    fn reach_by_bisection(&self, base: &[f64], axis: usize) -> Option<f64> {
        let mut point = base.to_vec();
        point[axis] = 0.0;
        if !self.contains(&point) {
            return None;
        }
        let mut lo = 0.0;
        let mut hi = self.out_radius() * (1.0 + 1e-9) + 1e-300;
        point[axis] = hi;
        if self.contains(&point) {
            return Some(hi);
        }
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            point[axis] = mid;
            if self.contains(&point) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Some(lo)
    }

    /// Largest value of coordinate `axis` over the body.
    pub fn axis_extent(&self, axis: usize) -> f64 {
        let mut e = vec![0.0; self.dim()];
        e[axis] = 1.0;
        if let Some(h) = self.support(&e) {
            return h;
        }
        self.reach(&vec![0.0; self.dim()], axis).unwrap_or(0.0)
    }

    /// Per-axis extents of the positive octant trace.
    pub fn positive_box(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.axis_extent(i)).collect()
    }
}

/// Membership through the support function: `x` belongs to the body iff
/// `h(u) - <x, u> >= 0` for every direction. The minimum slack is located on
/// a direction grid and refined locally.
pub(crate) fn support_membership(x: &[f64], unconditional: bool, h: impl Fn(&[f64]) -> f64) -> bool {
    let scale = norm(x);
    if scale == 0.0 {
        return true;
    }
    let point: Vec<f64> = if unconditional {
        x.iter().map(|v| v.abs()).collect()
    } else {
        x.to_vec()
    };
    let slack = |u: &[f64]| h(u) - dot(&point, u);
    let tol = -1e-10 * (1.0 + scale);
    let dim = x.len();
    let min_slack = match dim {
        1 => {
            let up = slack(&[1.0]);
            if unconditional {
                up
            } else {
                up.min(slack(&[-1.0]))
            }
        }
        2 => {
            let (lo, hi) = if unconditional {
                (0.0, std::f64::consts::FRAC_PI_2)
            } else {
                (0.0, 2.0 * std::f64::consts::PI)
            };
            let k = 256usize;
            let at = |t: f64| slack(&[t.cos(), t.sin()]);
            let step = (hi - lo) / k as f64;
            let (best_i, best) = (0..=k)
                .map(|i| (i, at(lo + step * i as f64)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty grid");
            if best < tol {
                return false;
            }
            let (mut a, mut b) = (lo + step * (best_i as f64 - 1.0), lo + step * (best_i as f64 + 1.0));
            if unconditional {
                a = a.max(lo);
                b = b.min(hi);
            }
            golden_min(at, a, b).min(best)
        }
        _ => {
            let dirs = if unconditional {
                directions::positive_octant(dim, 512)
            } else {
                directions::sphere(dim, 512)
            };
            let (mut u, mut best) = dirs
                .into_iter()
                .map(|u| {
                    let s = slack(&u);
                    (u, s)
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty direction set");
            let mut step = 0.05;
            while step > 1e-7 && best >= tol {
                let mut improved = false;
                for i in 0..dim {
                    for sign in [1.0, -1.0] {
                        let mut v = u.clone();
                        v[i] += sign * step;
                        if unconditional {
                            v.iter_mut().for_each(|c| *c = c.abs());
                        }
                        let n = norm(&v);
                        if n == 0.0 {
                            continue;
                        }
                        v.iter_mut().for_each(|c| *c /= n);
                        let s = slack(&v);
                        if s < best {
                            best = s;
                            u = v;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            best
        }
    };
    min_slack >= tol
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-13 {
            break;
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}

/// Kinds of two-body combination.
#[derive(Clone, Debug, PartialEq)]
pub enum CombinationKind {
    /// Coordinate-wise `+_p` with one mean order per axis.
    CoordPlusP(PVector),
    /// Firey `(+)_p` with a scalar order.
    FireyOPlusP(ExtReal),
    Minkowski,
}

/// Operands, weight and kind of a two-body combination.
#[derive(Clone, Debug)]
pub struct CombinationSpec {
    pub a: Body,
    pub b: Body,
    pub lambda: Weight,
    pub kind: CombinationKind,
}

impl CombinationSpec {
    pub fn coord(a: Body, b: Body, lambda: Weight, p: PVector) -> Self {
        CombinationSpec {
            a,
            b,
            lambda,
            kind: CombinationKind::CoordPlusP(p),
        }
    }

    pub fn firey(a: Body, b: Body, lambda: Weight, p: ExtReal) -> Self {
        CombinationSpec {
            a,
            b,
            lambda,
            kind: CombinationKind::FireyOPlusP(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.a.dim(), self.b.dim())?;
        if let CombinationKind::CoordPlusP(p) = &self.kind {
            check_dim(self.a.dim(), p.len())?;
        }
        Ok(())
    }
}

/// `(1 - lambda) A + lambda B`.
pub fn minkowski_combine(a: &Body, b: &Body, lambda: Weight) -> Result<Body> {
    check_dim(a.dim(), b.dim())?;
    if !a.has_support() || !b.has_support() {
        return Err(Error::Unsupported(
            "Minkowski combination needs support oracles on both operands".into(),
        ));
    }
    Ok(Body::Sum(Arc::new(MinkowskiSum {
        a: a.clone(),
        b: b.clone(),
        lambda,
    })))
}

/// `t * body`; `t = 0` yields the origin singleton, flagged degenerate.
pub fn dilate(body: &Body, t: f64) -> Result<Body> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("dilation factor must be finite and >= 0, got {t}")));
    }
    Ok(match body {
        Body::Dilate { inner, t: s } => Body::Dilate {
            inner: inner.clone(),
            t: t * s,
        },
        other => Body::Dilate {
            inner: Arc::new(other.clone()),
            t,
        },
    })
}

/// Support-function sup-distance over the given directions, which equals
/// the Hausdorff distance for convex bodies as the direction set densifies.
pub fn hausdorff_distance(a: &Body, b: &Body, directions: &[Vec<f64>]) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let mut worst: f64 = 0.0;
    for u in directions {
        let (Some(ha), Some(hb)) = (a.support(u), b.support(u)) else {
            return Err(Error::Unsupported(
                "Hausdorff distance needs support oracles".into(),
            ));
        };
        worst = worst.max((ha - hb).abs());
    }
    Ok(worst)
}
