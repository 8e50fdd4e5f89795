//! Experiment descriptions: shells, detector, emission plan, and the
//! reduction of geometry to interaction probabilities.
//!
//! A scenario file is TOML (top-level scalars first, as TOML requires):
//!
//! ```toml
//! trials = 1000000
//! seed = 42
//!
//! [[shells]]                    # ordered inner to outer
//! label = "inner"
//! radius_m = 1.0                # geometric form: radius + cross-section ...
//! cross_section_m2 = 12.566370614359172
//!
//! [[shells]]
//! label = "outer"
//! q = 0.25                      # ... or direct form: q alone, never both
//!
//! [detector]
//! q = 0.1
//! mode = "multiphoton"          # "single" or "multiphoton"
//!
//! [emission]
//! mode = "bunched"              # "separate" or "bunched"
//! photons_k = 3
//! interval_t_s = 1.0            # emission spacing; must be positive
//! ```
//!
//! Each surface carries either explicit geometry (`radius_m`,
//! `cross_section_m2`), reduced here via `q = a / (4 pi r^2)`, or a direct
//! probability `q`. Unknown keys and mixed forms are rejected at parse time;
//! physical constraints (probabilities in range, radii strictly increasing
//! outward, detector outside the shells, bunched emission paired with a
//! multiphoton detector) are checked by [`validate`], which reports every
//! violation it finds rather than the first.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::QVector;

/// How a surface's interaction probability is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceForm {
    /// Explicit geometry; reduces to `q = cross_section_m2 / (4 pi radius_m^2)`.
    Geometric { radius_m: f64, cross_section_m2: f64 },
    /// Interaction probability given directly.
    Direct { q: f64 },
}

impl SurfaceForm {
    /// The shell radius, when the surface is geometric.
    pub fn radius_m(&self) -> Option<f64> {
        match *self {
            SurfaceForm::Geometric { radius_m, .. } => Some(radius_m),
            SurfaceForm::Direct { .. } => None,
        }
    }
}

/// One absorber shell, ordered inner to outer in [`Scenario::shells`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSurface", into = "RawSurface")]
pub struct ShellSpec {
    pub label: String,
    pub form: SurfaceForm,
}

/// Whether the detector registers at most one photon per bunch or counts
/// every arriving photon independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorMode {
    Single,
    Multiphoton,
}

/// The detector surface outside the outermost shell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetector", into = "RawDetector")]
pub struct DetectorSpec {
    pub form: SurfaceForm,
    pub mode: DetectorMode,
}

/// Emission discipline for a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmissionMode {
    /// One photon at a time; every absorber relaxes between emissions.
    Separate,
    /// All `photons_k` photons traverse the chain together.
    Bunched,
}

/// How many photons are emitted and how they are grouped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionPlan {
    pub mode: EmissionMode,
    pub photons_k: u32,
    /// Spacing between emissions. Not used by the closed forms; recorded so
    /// a scenario states the regime it assumes (separate mode presumes the
    /// spacing exceeds every absorber's relaxation time).
    pub interval_t_s: f64,
}

/// A complete experiment description.
///
/// `trials` and `seed` precede the table-valued fields so the serialized
/// file keeps its top-level scalars above the first table header, as TOML
/// requires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub trials: u64,
    pub seed: u64,
    pub shells: Vec<ShellSpec>,
    pub detector: DetectorSpec,
    pub emission: EmissionPlan,
}

/// Serialized surface form: exactly one of the two shapes may be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cross_section_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
}

fn surface_form(
    context: &str,
    radius_m: Option<f64>,
    cross_section_m2: Option<f64>,
    q: Option<f64>,
) -> Result<SurfaceForm, String> {
    match (radius_m, cross_section_m2, q) {
        (Some(radius_m), Some(cross_section_m2), None) => {
            Ok(SurfaceForm::Geometric { radius_m, cross_section_m2 })
        }
        (None, None, Some(q)) => Ok(SurfaceForm::Direct { q }),
        (None, None, None) => Err(format!(
            "{context}: give either {{radius_m, cross_section_m2}} or {{q}}"
        )),
        (r, a, Some(_)) if r.is_some() || a.is_some() => Err(format!(
            "{context}: q is exclusive with radius_m/cross_section_m2; give one form, not both"
        )),
        _ => Err(format!(
            "{context}: radius_m and cross_section_m2 must be given together"
        )),
    }
}

impl TryFrom<RawSurface> for ShellSpec {
    type Error = String;

    fn try_from(raw: RawSurface) -> Result<Self, String> {
        let label = raw
            .label
            .ok_or_else(|| "shell: missing label".to_string())?;
        let context = format!("shell `{label}`");
        let form = surface_form(&context, raw.radius_m, raw.cross_section_m2, raw.q)?;
        Ok(ShellSpec { label, form })
    }
}

impl From<ShellSpec> for RawSurface {
    fn from(shell: ShellSpec) -> Self {
        let mut raw = RawSurface {
            label: Some(shell.label),
            radius_m: None,
            cross_section_m2: None,
            q: None,
        };
        match shell.form {
            SurfaceForm::Geometric { radius_m, cross_section_m2 } => {
                raw.radius_m = Some(radius_m);
                raw.cross_section_m2 = Some(cross_section_m2);
            }
            SurfaceForm::Direct { q } => raw.q = Some(q),
        }
        raw
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cross_section_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    mode: DetectorMode,
}

impl TryFrom<RawDetector> for DetectorSpec {
    type Error = String;

    fn try_from(raw: RawDetector) -> Result<Self, String> {
        let form = surface_form("detector", raw.radius_m, raw.cross_section_m2, raw.q)?;
        Ok(DetectorSpec { form, mode: raw.mode })
    }
}

impl From<DetectorSpec> for RawDetector {
    fn from(detector: DetectorSpec) -> Self {
        let mut raw = RawDetector {
            radius_m: None,
            cross_section_m2: None,
            q: None,
            mode: detector.mode,
        };
        match detector.form {
            SurfaceForm::Geometric { radius_m, cross_section_m2 } => {
                raw.radius_m = Some(radius_m);
                raw.cross_section_m2 = Some(cross_section_m2);
            }
            SurfaceForm::Direct { q } => raw.q = Some(q),
        }
        raw
    }
}

/// Geometry that cannot reduce to a probability.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error(
        "radius and cross-section must be positive and finite \
         (radius_m = {radius_m}, cross_section_m2 = {cross_section_m2})"
    )]
    NonPositive { radius_m: f64, cross_section_m2: f64 },
    #[error("cross-section exceeds the full sphere at this radius (q = {q} > 1)")]
    ExceedsSphere { q: f64 },
}

/// A scenario that cannot be loaded or does not describe a physical setup.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("surface `{surface}`: {source}")]
    Geometry {
        surface: String,
        source: GeometryError,
    },
    #[error("surface `{surface}`: q = {q} is not a probability in [0, 1]")]
    QOutOfRange { surface: String, q: f64 },
    #[error(
        "shell `{surface}`: radius {radius_m} m does not exceed the \
         previous shell radius {previous_m} m"
    )]
    ShellsNotIncreasing {
        surface: String,
        radius_m: f64,
        previous_m: f64,
    },
    #[error(
        "detector radius {radius_m} m does not exceed the outermost \
         shell radius {last_shell_m} m"
    )]
    DetectorNotOutermost { radius_m: f64, last_shell_m: f64 },
    #[error(
        "bunched emission with photons_k = {photons_k} needs a multiphoton \
         detector; a single-shot detector cannot count the bunch"
    )]
    DetectorMode { photons_k: u32 },
    #[error("emission.photons_k must be at least 1")]
    ZeroPhotons,
    #[error("emission.interval_t_s must be positive and finite, got {interval_t_s}")]
    NonPositiveInterval { interval_t_s: f64 },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

/// Every violation found by [`validate`], in scenario order.
#[derive(Debug)]
pub struct ValidationErrors(pub Vec<ScenarioError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for err in &self.0 {
            write!(f, "\n  - {err}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

/// Interaction probability of a point absorber of cross-section `a` on a
/// sphere of radius `r`: the fraction `a / (4 pi r^2)` of the full solid
/// angle, per the inverse-square spreading of an omnidirectional source.
pub fn vacuum_probability(radius_m: f64, cross_section_m2: f64) -> Result<f64, GeometryError> {
    if !radius_m.is_finite()
        || !cross_section_m2.is_finite()
        || radius_m <= 0.0
        || cross_section_m2 <= 0.0
    {
        return Err(GeometryError::NonPositive { radius_m, cross_section_m2 });
    }
    let q = cross_section_m2 / (4.0 * PI * radius_m * radius_m);
    if q > 1.0 {
        return Err(GeometryError::ExceedsSphere { q });
    }
    Ok(q)
}

fn resolve_q(surface: &str, form: &SurfaceForm, errors: &mut Vec<ScenarioError>) -> Option<f64> {
    match *form {
        SurfaceForm::Geometric { radius_m, cross_section_m2 } => {
            match vacuum_probability(radius_m, cross_section_m2) {
                Ok(q) => Some(q),
                Err(source) => {
                    errors.push(ScenarioError::Geometry { surface: surface.to_string(), source });
                    None
                }
            }
        }
        SurfaceForm::Direct { q } => {
            if q.is_finite() && (0.0..=1.0).contains(&q) {
                Some(q)
            } else {
                errors.push(ScenarioError::QOutOfRange { surface: surface.to_string(), q });
                None
            }
        }
    }
}

/// A scenario whose constraints all hold, with every surface reduced to its
/// interaction probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScenario {
    scenario: Scenario,
    qv: QVector,
}

impl ValidatedScenario {
    /// The reduced probability vector `(q_1 .. q_A, q_D)`.
    pub fn qv(&self) -> &QVector {
        &self.qv
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn shell_labels(&self) -> impl Iterator<Item = &str> {
        self.scenario.shells.iter().map(|s| s.label.as_str())
    }

    pub fn emission_mode(&self) -> EmissionMode {
        self.scenario.emission.mode
    }

    pub fn photons_k(&self) -> u32 {
        self.scenario.emission.photons_k
    }

    pub fn detector_mode(&self) -> DetectorMode {
        self.scenario.detector.mode
    }

    pub fn trials(&self) -> u64 {
        self.scenario.trials
    }

    pub fn seed(&self) -> u64 {
        self.scenario.seed
    }
}

/// Check every constraint and reduce the scenario to probabilities.
///
/// All violations are reported together: radii must increase strictly
/// outward, a geometric detector must sit outside the outermost geometric
/// shell, probabilities must land in `[0, 1]`, at least one photon must be
/// emitted per trial with a positive emission interval, and a bunch of two
/// or more photons needs a detector that can count them.
pub fn validate(scenario: &Scenario) -> Result<ValidatedScenario, ValidationErrors> {
    let mut errors = Vec::new();
    let mut absorber_qs = Vec::with_capacity(scenario.shells.len());

    let mut previous_radius: Option<f64> = None;
    for shell in &scenario.shells {
        if let Some(q) = resolve_q(&shell.label, &shell.form, &mut errors) {
            absorber_qs.push(q);
        }
        if let Some(radius_m) = shell.form.radius_m() {
            if let Some(previous_m) = previous_radius {
                if radius_m <= previous_m {
                    errors.push(ScenarioError::ShellsNotIncreasing {
                        surface: shell.label.clone(),
                        radius_m,
                        previous_m,
                    });
                }
            }
            previous_radius = Some(radius_m);
        }
    }

    let detector_q = resolve_q("detector", &scenario.detector.form, &mut errors);
    if let (Some(radius_m), Some(last_shell_m)) =
        (scenario.detector.form.radius_m(), previous_radius)
    {
        if radius_m <= last_shell_m {
            errors.push(ScenarioError::DetectorNotOutermost { radius_m, last_shell_m });
        }
    }

    let emission = &scenario.emission;
    if emission.photons_k == 0 {
        errors.push(ScenarioError::ZeroPhotons);
    }
    if !emission.interval_t_s.is_finite() || emission.interval_t_s <= 0.0 {
        errors.push(ScenarioError::NonPositiveInterval { interval_t_s: emission.interval_t_s });
    }
    if emission.mode == EmissionMode::Bunched
        && emission.photons_k > 1
        && scenario.detector.mode == DetectorMode::Single
    {
        errors.push(ScenarioError::DetectorMode { photons_k: emission.photons_k });
    }

    if !errors.is_empty() {
        return Err(ValidationErrors(errors));
    }

    let qv = QVector::new(absorber_qs, detector_q.expect("detector q resolved"))
        .expect("resolved probabilities are in range");
    Ok(ValidatedScenario { scenario: scenario.clone(), qv })
}

/// Read and parse a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    toml::from_str(&text)
        .map_err(|e| ScenarioError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

/// Write a scenario as TOML. Round-trips through [`load_scenario`].
pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<(), ScenarioError> {
    let text = toml::to_string(scenario)
        .map_err(|e| ScenarioError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    std::fs::write(path, text)
        .map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })
}
