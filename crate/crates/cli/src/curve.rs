use std::io::Write;

use lpbm::measures::{functional_b_curve, measure_curve, CurvePoint};

use crate::config::{CurveEntry, ScenarioConfig};
use crate::error::CliError;

fn grid(range: (f64, f64), points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| range.0 + (range.1 - range.0) * k as f64 / (points - 1) as f64)
        .collect()
}

pub fn evaluate_curve(config: &ScenarioConfig, name: &str) -> Result<Vec<CurvePoint>, CliError> {
    let config = config.materialize()?;
    let r = config.resolve()?;
    let entry = config.curves.get(name).ok_or_else(|| CliError::Config {
        key: format!("curves.{name}"),
        message: "no such curve".into(),
    })?;
    Ok(match entry {
        CurveEntry::Measure {
            body,
            density,
            transform,
            t_range,
            points,
            resolution,
        } => {
            let cfg = config.verify_config(*resolution).measure;
            measure_curve(r.body(body), r.density(density), *transform, &grid(*t_range, *points), &cfg)?
        }
        CurveEntry::Functional {
            f,
            g,
            t_range,
            points,
            resolution,
        } => {
            let cfg = config.verify_config(*resolution).measure;
            functional_b_curve(r.density(f), r.density(g), &grid(*t_range, *points), &cfg)?.points
        }
    })
}

pub fn write_csv(points: &[CurvePoint], out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "value", "abs_error"])?;
    for p in points {
        w.write_record([p.t.to_string(), p.estimate.value.to_string(), p.estimate.abs_error.to_string()])?;
    }
    w.flush()
}
