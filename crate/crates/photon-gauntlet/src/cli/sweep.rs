//! Grid sweeps: parsing `field=start:stop:step` axes and applying grid
//! points to a base scenario.
//!
//! Sweepable fields:
//!
//! * `q_<i>`: interaction probability of shell `i` (1-based, inner to
//!   outer). The shell keeps its label and becomes direct-form.
//! * `q_d`: detector interaction probability (mode preserved).
//! * `k`: photons per trial (integer grid).
//! * `a`: number of absorber shells (integer grid). Shrinking keeps the
//!   innermost shells; growing appends copies of the first shell's resolved
//!   probability, so the axis means "this many identical-strength absorbers
//!   added behind the template".
//!
//! A grid is the cartesian product of the axes in the order given on the
//! command line, last axis varying fastest.

use crate::scenario::{Scenario, ShellSpec, SurfaceForm};

/// A sweep request that cannot be turned into a grid.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("sweep spec `{spec}` is not of the form field=start:stop:step")]
    Malformed { spec: String },
    #[error("unknown sweep field `{field}` (expected q_<i>, q_d, k, or a)")]
    UnknownField { field: String },
    #[error("sweep step must be positive and finite, got {step}")]
    NonPositiveStep { step: f64 },
    #[error("sweep range `{spec}` contains no points (start must not exceed stop)")]
    EmptyRange { spec: String },
    #[error("field `{field}` takes integers; {value} is not one")]
    NotAnInteger { field: String, value: f64 },
    #[error("shell index {index} is out of range; the scenario has {shells} shells")]
    ShellIndexOutOfRange { index: usize, shells: usize },
    #[error("cannot sweep absorber count: the scenario has no shell to use as a template")]
    NoTemplateShell,
    #[error("cannot sweep absorber count: the template shell does not resolve ({message})")]
    BadTemplateShell { message: String },
}

/// What a sweep axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepField {
    /// 1-based shell index.
    ShellQ(usize),
    DetectorQ,
    PhotonsK,
    AbsorberCount,
}

impl SweepField {
    pub fn name(self) -> String {
        match self {
            SweepField::ShellQ(i) => format!("q_{i}"),
            SweepField::DetectorQ => "q_d".to_string(),
            SweepField::PhotonsK => "k".to_string(),
            SweepField::AbsorberCount => "a".to_string(),
        }
    }

    /// Whether the axis takes integer values (`k` and `a` do).
    pub fn is_integer(self) -> bool {
        matches!(self, SweepField::PhotonsK | SweepField::AbsorberCount)
    }

    fn parse(field: &str) -> Result<Self, SweepError> {
        match field {
            "q_d" => return Ok(SweepField::DetectorQ),
            "k" => return Ok(SweepField::PhotonsK),
            "a" => return Ok(SweepField::AbsorberCount),
            _ => {}
        }
        if let Some(index) = field.strip_prefix("q_") {
            if let Ok(i) = index.parse::<usize>() {
                if i >= 1 {
                    return Ok(SweepField::ShellQ(i));
                }
            }
        }
        Err(SweepError::UnknownField { field: field.to_string() })
    }
}

/// One axis of the grid: a field and the values it takes, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub field: SweepField,
    pub values: Vec<f64>,
}

/// Parse `field=start:stop:step` into an axis. The stop value is included
/// when it lands on the step lattice (within a relative slack of `1e-9`, so
/// decimal steps like `0.1` behave as written).
pub fn parse_axis(spec: &str) -> Result<SweepAxis, SweepError> {
    let malformed = || SweepError::Malformed { spec: spec.to_string() };
    let (field, range) = spec.split_once('=').ok_or_else(malformed)?;
    let field = SweepField::parse(field.trim())?;
    let mut parts = range.split(':');
    let (start, stop, step) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), Some(c), None) => {
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| malformed());
            (parse(a)?, parse(b)?, parse(c)?)
        }
        _ => return Err(malformed()),
    };
    if !start.is_finite() || !stop.is_finite() {
        return Err(malformed());
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(SweepError::NonPositiveStep { step });
    }
    if stop < start {
        return Err(SweepError::EmptyRange { spec: spec.to_string() });
    }
    let span = (stop - start) / step;
    let points = (span + 1e-9).floor() as usize + 1;
    let mut values = Vec::with_capacity(points);
    for i in 0..points {
        values.push(start + i as f64 * step);
    }
    if field.is_integer() {
        for &value in &values {
            if (value - value.round()).abs() > 1e-9 {
                return Err(SweepError::NotAnInteger { field: field.name(), value });
            }
        }
    }
    Ok(SweepAxis { field, values })
}

/// Every grid point as a value per axis, axes in input order, last axis
/// varying fastest.
pub fn cartesian(axes: &[SweepAxis]) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.values.len());
        for point in &points {
            for &value in &axis.values {
                let mut extended = point.clone();
                extended.push(value);
                next.push(extended);
            }
        }
        points = next;
    }
    points
}

/// Apply one grid point to a copy of the base scenario.
pub fn apply_point(
    base: &Scenario,
    axes: &[SweepAxis],
    point: &[f64],
) -> Result<Scenario, SweepError> {
    debug_assert_eq!(axes.len(), point.len());
    let mut scenario = base.clone();
    for (axis, &value) in axes.iter().zip(point) {
        match axis.field {
            SweepField::ShellQ(index) => {
                let shells = scenario.shells.len();
                let shell = scenario
                    .shells
                    .get_mut(index - 1)
                    .ok_or(SweepError::ShellIndexOutOfRange { index, shells })?;
                shell.form = SurfaceForm::Direct { q: value };
            }
            SweepField::DetectorQ => {
                scenario.detector.form = SurfaceForm::Direct { q: value };
            }
            SweepField::PhotonsK => {
                scenario.emission.photons_k = value.round() as u32;
            }
            SweepField::AbsorberCount => {
                let target = value.round() as usize;
                resize_shells(&mut scenario, target)?;
            }
        }
    }
    Ok(scenario)
}

fn resize_shells(scenario: &mut Scenario, target: usize) -> Result<(), SweepError> {
    if scenario.shells.len() >= target {
        scenario.shells.truncate(target);
        return Ok(());
    }
    let template = scenario.shells.first().ok_or(SweepError::NoTemplateShell)?;
    let q = match template.form {
        SurfaceForm::Direct { q } => q,
        SurfaceForm::Geometric { radius_m, cross_section_m2 } => {
            crate::scenario::vacuum_probability(radius_m, cross_section_m2)
                .map_err(|e| SweepError::BadTemplateShell { message: e.to_string() })?
        }
    };
    let label = template.label.clone();
    while scenario.shells.len() < target {
        let n = scenario.shells.len() + 1;
        scenario.shells.push(ShellSpec {
            label: format!("{label}_{n}"),
            form: SurfaceForm::Direct { q },
        });
    }
    Ok(())
}
