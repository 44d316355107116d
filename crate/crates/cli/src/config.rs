//! Scenario configuration: named bodies, densities and curves, and the list
//! of checks to run, with every default made explicit after loading.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use lpbm::bodies::{Body, BodySpec};
use lpbm::certify::Region;
use lpbm::means::{gamma_compose, ExtReal, PVector};
use lpbm::measures::{CurveTransform, Density, MeasureConfig};
use lpbm::verify::{default_lambdas, uhrin_default_resolution, ScanLogBmConfig, VerifyConfig};

use crate::error::CliError;

pub const SCHEMA: &str = "lpbm-scenario/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance_factor")]
    pub tolerance_factor: f64,
    #[serde(default)]
    pub tolerance_override: Option<f64>,
    #[serde(default = "default_output")]
    pub output: String,
    #[serde(default)]
    pub bodies: BTreeMap<String, BodySpec>,
    #[serde(default)]
    pub densities: BTreeMap<String, DensityEntry>,
    #[serde(default)]
    pub curves: BTreeMap<String, CurveEntry>,
    #[serde(default)]
    pub checks: Vec<CheckEntry>,
}

fn default_tolerance_factor() -> f64 {
    3.0
}

fn default_output() -> String {
    "lpbm-out".into()
}

/// Densities by family; derived ones refer to other entries by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityEntry {
    Lebesgue { dim: usize },
    Gaussian { dim: usize },
    PowerConvex { dim: usize, alpha: f64, beta: f64 },
    /// Indicator of a named body.
    UniformOn { body: String },
    /// A named density times the indicator of a named body.
    Restrict { base: String, body: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveEntry {
    /// `t -> mu(c(t) A)` for a dilation transform `c`.
    Measure {
        body: String,
        density: String,
        transform: CurveTransform,
        t_range: (f64, f64),
        points: usize,
        #[serde(default)]
        resolution: Option<usize>,
    },
    /// `t -> int f(e^{-t} x) g(x) dx`.
    Functional {
        f: String,
        g: String,
        t_range: (f64, f64),
        points: usize,
        #[serde(default)]
        resolution: Option<usize>,
    },
}

/// Potentials accepted by the lifting and certificate checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialEntry {
    /// `|x|^2 / 2`.
    Quadratic { dim: usize },
    /// The potential `-ln` of a named density.
    Density { density: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    #[default]
    Certified,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckEntry {
    /// Heading under which the check is summarized.
    pub section: String,
    pub check: CheckKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckKind {
    Bmi {
        a: String,
        b: String,
        density: String,
        p: Vec<ExtReal>,
        #[serde(default)]
        lambdas: Option<Vec<f64>>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    BmiMset {
        bodies: Vec<String>,
        weights: Vec<f64>,
        density: String,
        p: Vec<ExtReal>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    Inclusion {
        a: String,
        b: String,
        p: f64,
        lambda: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    Plus1IsMinkowski {
        a: String,
        b: String,
        lambda: f64,
        #[serde(default)]
        resolution: Option<usize>,
    },
    FireyCorollary {
        a: String,
        b: String,
        density: String,
        p: f64,
        #[serde(default)]
        lambdas: Option<Vec<f64>>,
        #[serde(default)]
        directions: Option<usize>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    PowerDilationConcavity {
        body: String,
        density: String,
        p: f64,
        t_range: (f64, f64),
        triples: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    DilationConcavity {
        body: String,
        density: String,
        p: f64,
        t_range: (f64, f64),
        triples: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    GaussianImprovement {
        a: String,
        b: String,
        gamma: f64,
        #[serde(default)]
        lambdas: Option<Vec<f64>>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    BProperty {
        density: String,
        body: String,
        t_range: (f64, f64),
        triples: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    FunctionalB {
        f: String,
        g: String,
        t_range: (f64, f64),
        triples: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    Uhrin {
        f: String,
        g: String,
        alpha: ExtReal,
        p: Vec<ExtReal>,
        lambda: f64,
        #[serde(default)]
        resolution: Option<usize>,
    },
    LiftToUniform {
        potential: PotentialEntry,
        ps: Vec<usize>,
        half_extents: Vec<f64>,
        #[serde(default = "default_lift_grid")]
        grid_per_axis: usize,
        final_bound: f64,
        #[serde(default = "default_convexity_samples")]
        convexity_samples: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    CertifyRegion {
        potential: PotentialEntry,
        gamma: f64,
        region: Region,
        #[serde(default)]
        expect: Expectation,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Exploratory; its verdict never fails a run.
    ScanLogBm { scan: ScanLogBmConfig },
}

fn default_samples() -> usize {
    10_000
}

fn default_lift_grid() -> usize {
    81
}

fn default_convexity_samples() -> usize {
    2000
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Bmi { .. } => "check_bmi",
            CheckKind::BmiMset { .. } => "check_bmi_mset",
            CheckKind::Inclusion { .. } => "check_inclusion",
            CheckKind::Plus1IsMinkowski { .. } => "check_plus1_is_minkowski",
            CheckKind::FireyCorollary { .. } => "check_firey_corollary",
            CheckKind::PowerDilationConcavity { .. } => "check_power_dilation_concavity",
            CheckKind::DilationConcavity { .. } => "check_dilation_concavity",
            CheckKind::GaussianImprovement { .. } => "check_gaussian_improvement",
            CheckKind::BProperty { .. } => "check_b_property",
            CheckKind::FunctionalB { .. } => "check_functional_b",
            CheckKind::Uhrin { .. } => "uhrin_functional_check",
            CheckKind::LiftToUniform { .. } => "lift_to_uniform",
            CheckKind::CertifyRegion { .. } => "certify_region",
            CheckKind::ScanLogBm { .. } => "scan_log_bm",
        }
    }

    pub fn is_exploratory(&self) -> bool {
        matches!(self, CheckKind::ScanLogBm { .. })
    }
}

/// Bodies and densities built from a validated configuration.
pub struct Resolved {
    pub bodies: BTreeMap<String, Body>,
    pub densities: BTreeMap<String, Density>,
}

impl Resolved {
    pub fn body(&self, name: &str) -> &Body {
        &self.bodies[name]
    }

    pub fn density(&self, name: &str) -> &Density {
        &self.densities[name]
    }
}

fn config_err(key: impl Into<String>, message: impl std::fmt::Display) -> CliError {
    CliError::Config {
        key: key.into(),
        message: message.to_string(),
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| {
            config_err(format!("line {} column {}", e.line(), e.column()), e)
        })?;
        if config.schema != SCHEMA {
            return Err(config_err("schema", format!("expected \"{SCHEMA}\", got \"{}\"", config.schema)));
        }
        Ok(config)
    }

    pub fn verify_config(&self, resolution: Option<usize>) -> VerifyConfig {
        VerifyConfig {
            measure: MeasureConfig {
                resolution,
                seed: self.seed,
                ..MeasureConfig::default()
            },
            tolerance_factor: self.tolerance_factor,
            tolerance_override: self.tolerance_override,
            directions: None,
        }
    }

    /// Builds every named body and density, checking references, dimensions
    /// and admissibility before any integration runs.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let mut bodies = BTreeMap::new();
        for (name, spec) in &self.bodies {
            let body = spec.build().map_err(|e| config_err(format!("bodies.{name}"), e))?;
            bodies.insert(name.clone(), body);
        }
        let mut densities = BTreeMap::new();
        // derived entries may refer to entries built later in name order
        let mut pending: Vec<&String> = self.densities.keys().collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for name in pending {
                match self.build_density(name, &bodies, &densities)? {
                    Some(d) => {
                        densities.insert(name.clone(), d);
                    }
                    None => rest.push(name),
                }
            }
            if rest.len() == before {
                return Err(config_err(format!("densities.{}", rest[0]), "unknown or cyclic base density"));
            }
            pending = rest;
        }
        let resolved = Resolved { bodies, densities };
        for (name, curve) in &self.curves {
            self.validate_curve(name, curve, &resolved)?;
        }
        for (i, entry) in self.checks.iter().enumerate() {
            self.validate_check(&format!("checks[{i}]"), &entry.check, &resolved)?;
        }
        Ok(resolved)
    }

    fn build_density(
        &self,
        name: &str,
        bodies: &BTreeMap<String, Body>,
        built: &BTreeMap<String, Density>,
    ) -> Result<Option<Density>, CliError> {
        let key = format!("densities.{name}");
        let body = |field: &str, b: &str| {
            bodies
                .get(b)
                .cloned()
                .ok_or_else(|| config_err(format!("{key}.{field}"), format!("unknown body \"{b}\"")))
        };
        let density = match &self.densities[name] {
            DensityEntry::Lebesgue { dim } => Density::lebesgue(*dim),
            DensityEntry::Gaussian { dim } => Density::gaussian(*dim),
            DensityEntry::PowerConvex { dim, alpha, beta } => {
                Density::power_convex(*dim, *alpha, *beta).map_err(|e| config_err(&key, e))?
            }
            DensityEntry::UniformOn { body: b } => {
                Density::uniform_on(body("body", b)?).map_err(|e| config_err(&key, e))?
            }
            DensityEntry::Restrict { base, body: b } => {
                if !self.densities.contains_key(base) {
                    return Err(config_err(format!("{key}.base"), format!("unknown density \"{base}\"")));
                }
                let Some(base) = built.get(base) else {
                    return Ok(None);
                };
                base.restrict(body("body", b)?).map_err(|e| config_err(&key, e))?
            }
        };
        Ok(Some(density))
    }

    fn validate_curve(&self, name: &str, curve: &CurveEntry, r: &Resolved) -> Result<(), CliError> {
        let key = format!("curves.{name}");
        let (range, points) = match curve {
            CurveEntry::Measure {
                body,
                density,
                t_range,
                points,
                ..
            } => {
                let b = lookup_body(r, &key, "body", body)?;
                let d = lookup_density(r, &key, "density", density)?;
                same_dim(&key, b.dim(), d.dim())?;
                (t_range, points)
            }
            CurveEntry::Functional { f, g, t_range, points, .. } => {
                let (f, g) = (lookup_density(r, &key, "f", f)?, lookup_density(r, &key, "g", g)?);
                same_dim(&key, f.dim(), g.dim())?;
                (t_range, points)
            }
        };
        if !(range.0 < range.1) || *points < 2 {
            return Err(config_err(format!("{key}.t_range"), "need t_min < t_max and at least 2 points"));
        }
        Ok(())
    }

    fn validate_check(&self, key: &str, check: &CheckKind, r: &Resolved) -> Result<(), CliError> {
        let orders = |field: &str, p: &[ExtReal], dim: usize| -> Result<PVector, CliError> {
            if p.len() != dim {
                return Err(config_err(format!("{key}.{field}"), format!("expected {dim} orders, got {}", p.len())));
            }
            Ok(PVector::new(p.to_vec()))
        };
        let admissible = |field: &str, p: &PVector, alpha: ExtReal| {
            gamma_compose(p, alpha).map(|_| ()).map_err(|e| config_err(format!("{key}.{field}"), e))
        };
        match check {
            CheckKind::Bmi { a, b, density, p, .. } => {
                let d = lookup_density(r, key, "density", density)?;
                for (field, name) in [("a", a), ("b", b)] {
                    same_dim(key, lookup_body(r, key, field, name)?.dim(), d.dim())?;
                }
                admissible("p", &orders("p", p, d.dim())?, d.alpha())?;
            }
            CheckKind::BmiMset { bodies, weights, density, p, .. } => {
                let d = lookup_density(r, key, "density", density)?;
                for (i, name) in bodies.iter().enumerate() {
                    same_dim(key, lookup_body(r, key, &format!("bodies[{i}]"), name)?.dim(), d.dim())?;
                }
                if weights.len() != bodies.len() {
                    return Err(config_err(format!("{key}.weights"), "one weight per body is required"));
                }
                admissible("p", &orders("p", p, d.dim())?, d.alpha())?;
            }
            CheckKind::Inclusion { a, b, .. }
            | CheckKind::Plus1IsMinkowski { a, b, .. }
            | CheckKind::GaussianImprovement { a, b, .. } => {
                let da = lookup_body(r, key, "a", a)?.dim();
                same_dim(key, da, lookup_body(r, key, "b", b)?.dim())?;
            }
            CheckKind::FireyCorollary { a, b, density, p, .. } => {
                let d = lookup_density(r, key, "density", density)?;
                for (field, name) in [("a", a), ("b", b)] {
                    same_dim(key, lookup_body(r, key, field, name)?.dim(), d.dim())?;
                }
                let orders = PVector::uniform(ExtReal::new(*p).map_err(|e| config_err(format!("{key}.p"), e))?, d.dim());
                admissible("p", &orders, d.alpha())?;
            }
            CheckKind::PowerDilationConcavity { body, density, .. }
            | CheckKind::DilationConcavity { body, density, .. }
            | CheckKind::BProperty { body, density, .. } => {
                let d = lookup_density(r, key, "density", density)?;
                same_dim(key, lookup_body(r, key, "body", body)?.dim(), d.dim())?;
            }
            CheckKind::FunctionalB { f, g, .. } => {
                let f = lookup_density(r, key, "f", f)?;
                same_dim(key, f.dim(), lookup_density(r, key, "g", g)?.dim())?;
            }
            CheckKind::Uhrin { f, g, alpha, p, .. } => {
                let f = lookup_density(r, key, "f", f)?;
                same_dim(key, f.dim(), lookup_density(r, key, "g", g)?.dim())?;
                admissible("alpha", &orders("p", p, f.dim())?, *alpha)?;
            }
            CheckKind::LiftToUniform { potential, half_extents, .. } => {
                let dim = potential_dim(key, potential, r)?;
                same_dim(key, dim, half_extents.len())?;
            }
            CheckKind::CertifyRegion { potential, .. } => {
                potential_dim(key, potential, r)?;
            }
            CheckKind::ScanLogBm { .. } => {}
        }
        Ok(())
    }

    /// Writes out every default: seeds, resolutions and lambda grids.
    pub fn materialize(&self) -> Result<ScenarioConfig, CliError> {
        let r = self.resolve()?;
        let mut out = self.clone();
        let seed = self.seed;
        let measure = MeasureConfig::default();
        let res_for = |dim: usize| measure.resolution_for(dim);
        for entry in &mut out.checks {
            match &mut entry.check {
                CheckKind::Bmi { density, lambdas, resolution, .. }
                | CheckKind::FireyCorollary { density, lambdas, resolution, .. } => {
                    lambdas.get_or_insert_with(|| default_lambdas(false));
                    resolution.get_or_insert(res_for(r.density(density).dim()));
                }
                CheckKind::GaussianImprovement { a, lambdas, resolution, .. } => {
                    lambdas.get_or_insert_with(|| default_lambdas(false));
                    resolution.get_or_insert(res_for(r.body(a).dim()));
                }
                CheckKind::BmiMset { density, resolution, .. } => {
                    resolution.get_or_insert(res_for(r.density(density).dim()));
                }
                CheckKind::Inclusion { a, seed: s, resolution, .. } => {
                    s.get_or_insert(seed);
                    resolution.get_or_insert(res_for(r.body(a).dim()));
                }
                CheckKind::Plus1IsMinkowski { a, resolution, .. } => {
                    resolution.get_or_insert(res_for(r.body(a).dim()));
                }
                CheckKind::PowerDilationConcavity { density, seed: s, resolution, .. }
                | CheckKind::DilationConcavity { density, seed: s, resolution, .. }
                | CheckKind::BProperty { density, seed: s, resolution, .. } => {
                    s.get_or_insert(seed);
                    resolution.get_or_insert(res_for(r.density(density).dim()));
                }
                CheckKind::FunctionalB { f, seed: s, resolution, .. } => {
                    s.get_or_insert(seed);
                    resolution.get_or_insert(res_for(r.density(f).dim()));
                }
                CheckKind::Uhrin { f, resolution, .. } => {
                    resolution.get_or_insert(uhrin_default_resolution(r.density(f).dim()));
                }
                CheckKind::LiftToUniform { seed: s, .. } | CheckKind::CertifyRegion { seed: s, .. } => {
                    s.get_or_insert(seed);
                }
                CheckKind::ScanLogBm { .. } => {}
            }
        }
        for curve in out.curves.values_mut() {
            match curve {
                CurveEntry::Measure { density, resolution, .. } => {
                    resolution.get_or_insert(res_for(r.density(density).dim()));
                }
                CurveEntry::Functional { f, resolution, .. } => {
                    resolution.get_or_insert(res_for(r.density(f).dim()));
                }
            }
        }
        Ok(out)
    }
}

fn lookup_body<'a>(r: &'a Resolved, key: &str, field: &str, name: &str) -> Result<&'a Body, CliError> {
    r.bodies
        .get(name)
        .ok_or_else(|| config_err(format!("{key}.{field}"), format!("unknown body \"{name}\"")))
}

fn lookup_density<'a>(r: &'a Resolved, key: &str, field: &str, name: &str) -> Result<&'a Density, CliError> {
    r.densities
        .get(name)
        .ok_or_else(|| config_err(format!("{key}.{field}"), format!("unknown density \"{name}\"")))
}

fn same_dim(key: &str, a: usize, b: usize) -> Result<(), CliError> {
    if a != b {
        return Err(config_err(key, format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

fn potential_dim(key: &str, potential: &PotentialEntry, r: &Resolved) -> Result<usize, CliError> {
    Ok(match potential {
        PotentialEntry::Quadratic { dim } => *dim,
        PotentialEntry::Density { density } => lookup_density(r, key, "potential.density", density)?.dim(),
    })
}
