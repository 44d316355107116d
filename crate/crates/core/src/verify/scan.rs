//! Exploratory search for small log-Brunn-Minkowski margins among planar
//! symmetric bodies given by trigonometric support functions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_lambdas, Estimate, Report, VerifyConfig};
use crate::bodies::WulffSet;
use crate::error::{domain, Result};

/// `h(t) = c0 + sum_k (a_k cos 2kt + b_k sin 2kt)` for coefficients
/// `[c0, a_1, b_1, a_2, b_2, ...]`; symmetric under `t -> t + pi`.
pub fn trig_support(coeffs: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |t| {
        coeffs[1..]
            .chunks(2)
            .enumerate()
            .map(|(k, ab)| {
                let f = 2.0 * (k + 1) as f64 * t;
                ab[0] * f.cos() + ab.get(1).copied().unwrap_or(0.0) * f.sin()
            })
            .sum::<f64>()
            + coeffs[0]
    }
}

/// `h + h'' > 0` on a fine angle grid.
fn is_convex(coeffs: &[f64]) -> bool {
    let radius_of_curvature = |t: f64| {
        coeffs[1..]
            .chunks(2)
            .enumerate()
            .map(|(k, ab)| {
                let m = 2.0 * (k + 1) as f64;
                let f = m * t;
                (1.0 - m * m) * (ab[0] * f.cos() + ab.get(1).copied().unwrap_or(0.0) * f.sin())
            })
            .sum::<f64>()
            + coeffs[0]
    };
    (0..1024).all(|j| radius_of_curvature(PI * j as f64 / 1024.0) > 1e-9)
}

fn polygon_area(offsets: impl Fn(f64) -> f64, directions: usize) -> Result<f64> {
    let dirs: Vec<Vec<f64>> = (0..directions)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / directions as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let values: Vec<f64> = (0..directions)
        .map(|j| offsets(2.0 * PI * j as f64 / directions as f64))
        .collect();
    let bound = values.iter().copied().fold(0.0, f64::max) * 2.0;
    let shape = WulffSet::new(dirs, values, false, bound)?;
    Ok(shape.area().expect("planar Wulff shapes carry a polygon"))
}

/// Areas `|(1-l) A (+)_0 l B|` and `|A|^{1-l} |B|^l` for planar bodies given
/// by their support functions in the angle, each body realized as the
/// Wulff polygon on `directions` equally spaced directions.
pub fn log_bm_margin(
    ha: &dyn Fn(f64) -> f64,
    hb: &dyn Fn(f64) -> f64,
    lambda: f64,
    directions: usize,
) -> Result<(f64, f64)> {
    if directions < 8 {
        return Err(domain("at least 8 directions are needed"));
    }
    let area_a = polygon_area(ha, directions)?;
    let area_b = polygon_area(hb, directions)?;
    let combined = polygon_area(|t| ha(t).powf(1.0 - lambda) * hb(t).powf(lambda), directions)?;
    Ok((combined, area_a.powf(1.0 - lambda) * area_b.powf(lambda)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanLogBmConfig {
    #[serde(default = "default_harmonics")]
    pub harmonics: usize,
    pub lambdas: Vec<f64>,
    /// Total margin evaluations allowed.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_directions")]
    pub directions: usize,
    /// Keep only cosine terms, which gives unconditional bodies.
    #[serde(default)]
    pub unconditional_only: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_harmonics() -> usize {
    3
}

fn default_budget() -> usize {
    600
}

fn default_restarts() -> usize {
    4
}

fn default_directions() -> usize {
    256
}

impl Default for ScanLogBmConfig {
    fn default() -> Self {
        ScanLogBmConfig {
            harmonics: default_harmonics(),
            lambdas: vec![0.25, 0.5, 0.75],
            budget: default_budget(),
            restarts: default_restarts(),
            directions: default_directions(),
            unconditional_only: false,
            seed: 0,
        }
    }
}

struct Search<'a> {
    cfg: &'a ScanLogBmConfig,
    evaluations: usize,
    rejected: usize,
}

impl Search<'_> {
    /// Smallest relative margin over the lambda grid, `None` if a body is
    /// not convex or the budget is spent.
    fn objective(&mut self, a: &[f64], b: &[f64]) -> Result<Option<f64>> {
        if self.evaluations >= self.cfg.budget {
            return Ok(None);
        }
        if !is_convex(a) || !is_convex(b) {
            self.rejected += 1;
            return Ok(None);
        }
        self.evaluations += 1;
        let (ha, hb) = (trig_support(a), trig_support(b));
        let mut worst = f64::INFINITY;
        for &l in &self.cfg.lambdas {
            let (lhs, rhs) = log_bm_margin(&ha, &hb, l, self.cfg.directions)?;
            worst = worst.min((lhs - rhs) / rhs);
        }
        Ok(Some(worst))
    }
}

fn random_coeffs(rng: &mut ChaCha8Rng, harmonics: usize, unconditional: bool) -> Vec<f64> {
    let mut c = vec![1.0];
    for k in 1..=harmonics {
        let cap = 0.45 / ((4 * k * k - 1) as f64 * harmonics as f64);
        c.push(rng.random_range(-cap..=cap));
        c.push(if unconditional { 0.0 } else { rng.random_range(-cap..=cap) });
    }
    c
}

/// Random restarts followed by coordinate descent on the smallest relative
/// margin. Exploratory: the report records what was found and asserts no
/// ground truth beyond the usual margin rule.
pub fn scan_log_bm(scan: &ScanLogBmConfig, cfg: &VerifyConfig) -> Result<Report> {
    check_lambdas(&scan.lambdas)?;
    if scan.harmonics == 0 || scan.restarts == 0 {
        return Err(domain("scan needs at least one harmonic and one restart"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scan.seed);
    let mut search = Search {
        cfg: scan,
        evaluations: 0,
        rejected: 0,
    };
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let per_restart = scan.budget / scan.restarts;
    for r in 0..scan.restarts {
        let stop = (r + 1) * per_restart;
        let mut a = random_coeffs(&mut rng, scan.harmonics, scan.unconditional_only);
        let mut b = random_coeffs(&mut rng, scan.harmonics, scan.unconditional_only);
        let Some(mut value) = search.objective(&a, &b)? else {
            continue;
        };
        let mut step = 0.05;
        // coefficient 0 of each body stays 1: the margin is scale invariant
        let free: Vec<usize> = (1..a.len())
            .filter(|i| !(scan.unconditional_only && i % 2 == 0))
            .collect();
        while step > 1e-4 && search.evaluations < stop {
            let mut improved = false;
            for which in 0..2 {
                for &i in &free {
                    for sign in [1.0, -1.0] {
                        let (mut ta, mut tb) = (a.clone(), b.clone());
                        let target = if which == 0 { &mut ta } else { &mut tb };
                        target[i] += sign * step;
                        if let Some(v) = search.objective(&ta, &tb)? {
                            if v < value {
                                value = v;
                                a = ta;
                                b = tb;
                                improved = true;
                            }
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|(v, _, _)| value < *v) {
            best = Some((value, a, b));
        }
    }
    let mut report = Report::new(
        "scan_log_bm",
        json!({
            "harmonics": scan.harmonics,
            "lambdas": scan.lambdas,
            "budget": scan.budget,
            "restarts": scan.restarts,
            "directions": scan.directions,
            "unconditional_only": scan.unconditional_only,
            "seed": scan.seed,
        }),
    );
    report.note("exploratory scan; not an acceptance gate");
    report.note(format!(
        "evaluations {}, rejected non-convex candidates {}",
        search.evaluations, search.rejected
    ));
    let Some((value, a, b)) = best else {
        report.note("no convex candidate evaluated");
        return Ok(report);
    };
    report.note(format!("smallest relative margin {value:.3e}"));
    report.note(format!("A coefficients {a:?}"));
    report.note(format!("B coefficients {b:?}"));
    let (ha, hb) = (trig_support(&a), trig_support(&b));
    for &l in &scan.lambdas {
        let (lhs, rhs) = log_bm_margin(&ha, &hb, l, scan.directions)?;
        let (lhs_c, rhs_c) = log_bm_margin(&ha, &hb, l, scan.directions / 2)?;
        report.push(cfg.row(
            format!("lambda={l}"),
            Estimate::new(lhs, (lhs - lhs_c).abs()),
            Estimate::new(rhs, (rhs - rhs_c).abs()),
        ));
    }
    Ok(report)
}
