use crate::error::{domain, Result};

/// `{x : sum_i (|x_i| / r_i)^q <= 1}`, `q` in `[1, +inf]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LqBall {
    q: f64,
    radii: Vec<f64>,
    out_radius: f64,
}

const MEMBERSHIP_SLACK: f64 = 1e-12;

impl LqBall {
    pub fn new(q: f64, radii: Vec<f64>) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(domain(format!("l_q ball needs q >= 1, got {q}")));
        }
        if radii.is_empty() {
            return Err(domain("l_q ball needs at least one radius"));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(domain(format!("l_q ball radii must be positive and finite, got {r}")));
        }
        let out_radius = Self::compute_out_radius(q, &radii);
        Ok(LqBall {
            q,
            radii,
            out_radius,
        })
    }

    /// Axis-aligned box `prod [-r_i, r_i]`.
    pub fn cube(radii: Vec<f64>) -> Result<Self> {
        Self::new(f64::INFINITY, radii)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn dim(&self) -> usize {
        self.radii.len()
    }

    pub fn out_radius(&self) -> f64 {
        self.out_radius
    }

    fn compute_out_radius(q: f64, radii: &[f64]) -> f64 {
        let max_r = radii.iter().copied().fold(0.0, f64::max);
        if q <= 2.0 {
            return max_r;
        }
        let euclid = radii.iter().map(|r| r * r).sum::<f64>().sqrt();
        if q.is_infinite() || radii.len() != 2 {
            return euclid;
        }
        // 2D: maximize the radial function on a dense angle grid.
        let probe = LqBall {
            q,
            radii: radii.to_vec(),
            out_radius: euclid,
        };
        let best = (0..=4096)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 * k as f64 / 4096.0;
                probe.radial(&[t.cos(), t.sin()])
            })
            .fold(0.0, f64::max);
        (best * (1.0 + 1e-6)).min(euclid)
    }

    /// `sum_i (|x_i| / r_i)^q`, or the max ratio for `q = inf`.
    fn gauge_power(&self, x: &[f64]) -> f64 {
        let ratios = x.iter().zip(&self.radii).map(|(v, r)| v.abs() / r);
        if self.q.is_infinite() {
            ratios.fold(0.0, f64::max)
        } else {
            ratios.map(|t| t.powf(self.q)).sum()
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge_power(x) <= 1.0 + MEMBERSHIP_SLACK
    }

    /// Largest `s` with `s * u` in the ball.
    pub fn radial(&self, u: &[f64]) -> f64 {
        let g = self.gauge_power(u);
        let gauge = if self.q.is_infinite() { g } else { g.powf(1.0 / self.q) };
        1.0 / gauge
    }

    /// `(sum_i (r_i |u_i|)^{q'})^{1/q'}` with `1/q + 1/q' = 1`.
    pub fn support(&self, u: &[f64]) -> f64 {
        let terms = u.iter().zip(&self.radii).map(|(v, r)| v.abs() * r);
        if self.q == 1.0 {
            terms.fold(0.0, f64::max)
        } else if self.q.is_infinite() {
            terms.sum()
        } else {
            let dual = self.q / (self.q - 1.0);
            terms.map(|t| t.powf(dual)).sum::<f64>().powf(1.0 / dual)
        }
    }

    /// `sup {s >= 0 : base + s e_axis in ball}` for a base with `base[axis]`
    /// treated as zero; `None` when the base itself is outside.
    pub fn reach(&self, base: &[f64], axis: usize) -> Option<f64> {
        let r_axis = self.radii[axis];
        let others = base
            .iter()
            .zip(&self.radii)
            .enumerate()
            .filter(|(i, _)| *i != axis)
            .map(|(_, (v, r))| v.abs() / r);
        if self.q.is_infinite() {
            let worst = others.fold(0.0, f64::max);
            return (worst <= 1.0 + MEMBERSHIP_SLACK).then_some(r_axis);
        }
        let used: f64 = others.map(|t| t.powf(self.q)).sum();
        if used > 1.0 + MEMBERSHIP_SLACK {
            return None;
        }
        Some(r_axis * (1.0 - used).max(0.0).powf(1.0 / self.q))
    }
}
