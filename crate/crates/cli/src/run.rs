//! Executes the checks of a materialized scenario and writes the report
//! files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use lpbm::certify::{certify_region, potential_of, CertificateVerdict, Potential, ScanConfig};
use lpbm::means::{ExtReal, PVector};
use lpbm::verify::{
    check_b_property, check_bmi, check_bmi_mset, check_dilation_concavity, check_firey_corollary,
    check_functional_b, check_gaussian_improvement, check_inclusion, check_lifting, check_plus1_is_minkowski,
    check_power_dilation_concavity, scan_log_bm, uhrin_functional_check, Estimate, Report, Row, TripleGrid,
    Verdict,
};

use crate::config::{CheckEntry, CheckKind, Expectation, PotentialEntry, Resolved, ScenarioConfig};
use crate::error::CliError;

/// `|x|^2 / 2` with its closed-form derivatives.
struct Quadratic {
    dim: usize,
}

impl Potential for Quadratic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.to_vec())
    }

    fn hessian(&self, _x: &[f64]) -> Option<Vec<Vec<f64>>> {
        Some(
            (0..self.dim)
                .map(|i| (0..self.dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }
}

fn potential(entry: &PotentialEntry, r: &Resolved) -> lpbm::Result<Arc<dyn Potential>> {
    Ok(match entry {
        PotentialEntry::Quadratic { dim } => Arc::new(Quadratic { dim: *dim }),
        PotentialEntry::Density { density } => Arc::from(potential_of(r.density(density))?),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub index: usize,
    pub section: String,
    pub check: String,
    pub exploratory: bool,
    pub reports: Vec<Report>,
}

impl CheckOutcome {
    pub fn verdict(&self) -> Verdict {
        self.reports.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Boundary)
    }

    /// Exploratory checks report but never decide the run.
    fn counted(&self) -> Option<Verdict> {
        (!self.exploratory).then(|| self.verdict())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub config_digest: String,
    pub outcomes: Vec<CheckOutcome>,
}

impl RunReport {
    pub fn failed(&self, strict: bool) -> bool {
        self.outcomes.iter().filter_map(CheckOutcome::counted).any(|v| match v {
            Verdict::Fail => true,
            Verdict::Boundary => strict,
            Verdict::Pass => false,
        })
    }
}

pub fn run_scenario(config: &ScenarioConfig, jobs: usize) -> Result<RunReport, CliError> {
    let resolved = config.resolve()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config {
            key: "--jobs".into(),
            message: e.to_string(),
        })?;
    let outcomes = pool.install(|| {
        config
            .checks
            .par_iter()
            .enumerate()
            .map(|(index, entry)| run_entry(config, &resolved, index, entry))
            .collect()
    });
    let value = serde_json::to_value(config).expect("configurations serialize");
    Ok(RunReport {
        schema: "lpbm-report/1",
        config_digest: lpbm::verify::digest_of(&value),
        outcomes,
    })
}

fn run_entry(config: &ScenarioConfig, r: &Resolved, index: usize, entry: &CheckEntry) -> CheckOutcome {
    let reports = run_check(config, r, &entry.check).unwrap_or_else(|e| {
        let params = serde_json::to_value(&entry.check).expect("checks serialize");
        let mut report = Report::new(entry.check.name(), params);
        report.downgrade(Verdict::Fail);
        report.note(format!("error: {e}"));
        vec![report]
    });
    CheckOutcome {
        index,
        section: entry.section.clone(),
        check: entry.check.name().into(),
        exploratory: entry.check.is_exploratory(),
        reports,
    }
}

fn orders(p: &[ExtReal]) -> PVector {
    PVector::new(p.to_vec())
}

fn run_check(config: &ScenarioConfig, r: &Resolved, check: &CheckKind) -> lpbm::Result<Vec<Report>> {
    let seed_of = |s: &Option<u64>| s.unwrap_or(config.seed);
    let lambdas_of = |l: &Option<Vec<f64>>| l.clone().unwrap_or_else(|| lpbm::verify::default_lambdas(false));
    Ok(match check {
        CheckKind::Bmi {
            a,
            b,
            density,
            p,
            lambdas,
            resolution,
        } => check_bmi(
            r.body(a),
            r.body(b),
            r.density(density),
            &orders(p),
            &lambdas_of(lambdas),
            &config.verify_config(*resolution),
        )?,
        CheckKind::BmiMset {
            bodies,
            weights,
            density,
            p,
            resolution,
        } => {
            let bodies: Vec<_> = bodies.iter().map(|b| r.body(b).clone()).collect();
            vec![check_bmi_mset(
                &bodies,
                weights,
                r.density(density),
                &orders(p),
                &config.verify_config(*resolution),
            )?]
        }
        CheckKind::Inclusion {
            a,
            b,
            p,
            lambda,
            samples,
            seed,
            resolution,
        } => vec![check_inclusion(
            r.body(a),
            r.body(b),
            *p,
            *lambda,
            *samples,
            seed_of(seed),
            &config.verify_config(*resolution),
        )?],
        CheckKind::Plus1IsMinkowski { a, b, lambda, resolution } => vec![check_plus1_is_minkowski(
            r.body(a),
            r.body(b),
            *lambda,
            &config.verify_config(*resolution),
        )?],
        CheckKind::FireyCorollary {
            a,
            b,
            density,
            p,
            lambdas,
            directions,
            resolution,
        } => {
            let mut cfg = config.verify_config(*resolution);
            cfg.directions = *directions;
            check_firey_corollary(r.body(a), r.body(b), r.density(density), *p, &lambdas_of(lambdas), &cfg)?
        }
        CheckKind::PowerDilationConcavity {
            body,
            density,
            p,
            t_range,
            triples,
            seed,
            resolution,
        } => {
            let grid = TripleGrid::new(t_range.0, t_range.1, *triples, seed_of(seed))?;
            let cfg = config.verify_config(*resolution);
            vec![check_power_dilation_concavity(r.body(body), r.density(density), *p, &grid, &cfg)?]
        }
        CheckKind::DilationConcavity {
            body,
            density,
            p,
            t_range,
            triples,
            seed,
            resolution,
        } => {
            let grid = TripleGrid::new(t_range.0, t_range.1, *triples, seed_of(seed))?;
            let cfg = config.verify_config(*resolution);
            vec![check_dilation_concavity(r.body(body), r.density(density), *p, &grid, &cfg)?]
        }
        CheckKind::GaussianImprovement {
            a,
            b,
            gamma,
            lambdas,
            resolution,
        } => check_gaussian_improvement(
            r.body(a),
            r.body(b),
            *gamma,
            &lambdas_of(lambdas),
            &config.verify_config(*resolution),
        )?,
        CheckKind::BProperty {
            density,
            body,
            t_range,
            triples,
            seed,
            resolution,
        } => {
            let grid = TripleGrid::new(t_range.0, t_range.1, *triples, seed_of(seed))?;
            vec![check_b_property(r.density(density), r.body(body), &grid, &config.verify_config(*resolution))?]
        }
        CheckKind::FunctionalB {
            f,
            g,
            t_range,
            triples,
            seed,
            resolution,
        } => {
            let grid = TripleGrid::new(t_range.0, t_range.1, *triples, seed_of(seed))?;
            vec![check_functional_b(r.density(f), r.density(g), &grid, &config.verify_config(*resolution))?]
        }
        CheckKind::Uhrin {
            f,
            g,
            alpha,
            p,
            lambda,
            resolution,
        } => vec![uhrin_functional_check(
            r.density(f),
            r.density(g),
            *alpha,
            &orders(p),
            *lambda,
            &config.verify_config(*resolution),
        )?],
        CheckKind::LiftToUniform {
            potential: v,
            ps,
            half_extents,
            grid_per_axis,
            final_bound,
            convexity_samples,
            seed,
        } => vec![check_lifting(
            potential(v, r)?,
            ps,
            half_extents,
            *grid_per_axis,
            *final_bound,
            *convexity_samples,
            seed_of(seed),
        )?],
        CheckKind::CertifyRegion {
            potential: v,
            gamma,
            region,
            expect,
            seed,
        } => {
            let scan = ScanConfig {
                seed: seed_of(seed),
                ..ScanConfig::default()
            };
            let cert = certify_region(potential(v, r)?.as_ref(), *gamma, region, &scan)?;
            let reached = match (cert.verdict, expect) {
                (CertificateVerdict::Certified, Expectation::Certified)
                | (CertificateVerdict::Violated, Expectation::Violated) => true,
                _ => false,
            };
            let verdict = if cert.at_boundary || cert.verdict == CertificateVerdict::Inconclusive {
                Verdict::Boundary
            } else if reached {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            let params = serde_json::to_value(check).expect("checks serialize");
            let mut report = Report::new("certify_region", params);
            report.push(Row::decided(
                "0 vs largest criterion eigenvalue",
                Estimate::exact(0.0),
                Estimate::exact(cert.max_eigenvalue),
                verdict,
            ));
            report.note(format!(
                "{:?} over {} points, witness {:?}",
                cert.verdict, cert.points_checked, cert.witness
            ));
            vec![report]
        }
        CheckKind::ScanLogBm { scan } => vec![scan_log_bm(scan, &config.verify_config(None))?],
    })
}

#[derive(Serialize)]
struct DetailRow<'a> {
    check: &'a str,
    section: &'a str,
    digest: &'a str,
    label: &'a str,
    lhs: f64,
    lhs_err: f64,
    rhs: f64,
    rhs_err: f64,
    margin: f64,
    tolerance: f64,
    verdict: Verdict,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_outputs(report: &RunReport, materialized: &ScenarioConfig, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(io_err(&path))
    };
    write(
        "config.materialized.json",
        serde_json::to_string_pretty(materialized).expect("configurations serialize"),
    )?;
    write("report.json", serde_json::to_string_pretty(report).expect("reports serialize"))?;
    let path = dir.join("detail.csv");
    let mut csv = csv::Writer::from_path(&path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e.into(),
    })?;
    for outcome in &report.outcomes {
        for rep in &outcome.reports {
            for row in &rep.rows {
                csv.serialize(DetailRow {
                    check: &rep.check,
                    section: &outcome.section,
                    digest: &rep.digest,
                    label: &row.label,
                    lhs: row.lhs.value,
                    lhs_err: row.lhs.abs_error,
                    rhs: row.rhs.value,
                    rhs_err: row.rhs.abs_error,
                    margin: row.margin,
                    tolerance: row.tolerance,
                    verdict: row.verdict,
                })
                .map_err(|e| CliError::Io {
                    path: path.display().to_string(),
                    source: e.into(),
                })?;
            }
        }
    }
    csv.flush().map_err(io_err(&path))?;
    write("summary.txt", summary(report))
}

#[derive(Default)]
struct Tally {
    checks: usize,
    pass: usize,
    boundary: usize,
    fail: usize,
    exploratory: usize,
}

/// One line per section, in order of first appearance.
pub fn summary(report: &RunReport) -> String {
    let mut order: Vec<&str> = Vec::new();
    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();
    for o in &report.outcomes {
        if !tallies.contains_key(o.section.as_str()) {
            order.push(&o.section);
        }
        let t = tallies.entry(&o.section).or_default();
        t.checks += 1;
        match o.counted() {
            None => t.exploratory += 1,
            Some(Verdict::Pass) => t.pass += 1,
            Some(Verdict::Boundary) => t.boundary += 1,
            Some(Verdict::Fail) => t.fail += 1,
        }
    }
    let width = order.iter().map(|s| s.len()).max().unwrap_or(7).max(7);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>4}  {:>8}  {:>4}  {:>11}",
        "section", "checks", "pass", "boundary", "fail", "exploratory"
    );
    for s in order {
        let t = &tallies[s];
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>4}  {:>8}  {:>4}  {:>11}",
            s, t.checks, t.pass, t.boundary, t.fail, t.exploratory
        );
    }
    let _ = writeln!(out, "config digest {}", report.config_digest);
    out
}
