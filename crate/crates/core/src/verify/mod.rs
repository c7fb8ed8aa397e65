//! Named checks over registered targets, with deterministic reports.

pub mod checks;
pub mod target;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GeoError, Result};
use crate::sampling::{DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::tensorlab::frame::{FrameKind, Residual};

pub use checks::{check_info, CheckInfo, CHECKS, NEGATIVE_FLOOR};
pub use target::{Model, Target};

/// What a check is expected to show on its target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expected {
    /// Residual at most the tolerance.
    Pass,
    /// Residual above `floor` (negative controls, expected failures).
    Fail { floor: f64 },
    /// Residual within the tolerance of `value`.
    Value { value: f64 },
}

impl Expected {
    pub fn accepts(&self, max_abs: f64, tolerance: f64) -> bool {
        match *self {
            Self::Pass => max_abs <= tolerance,
            Self::Fail { floor } => max_abs > floor && max_abs.is_finite(),
            Self::Value { value } => (max_abs - value).abs() <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: String,
    pub target: String,
    pub tolerance: f64,
    pub sample_count: usize,
    pub seed: u64,
    /// `None`: the registry default for this check and target.
    pub expected: Option<Expected>,
}

impl CheckSpec {
    /// Spec with the registry tolerance and the default sample plan.
    pub fn new(name: &str, target: &str) -> Result<Self> {
        let info = check_info(name)?;
        Ok(Self {
            name: name.to_string(),
            target: target.to_string(),
            tolerance: info.tolerance,
            sample_count: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            expected: None,
        })
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.sample_count = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn expecting(mut self, e: Expected) -> Self {
        self.expected = Some(e);
        self
    }

    fn validate(&self) -> Result<Target> {
        check_info(&self.name)?;
        if !(self.tolerance > 0.0) {
            return Err(GeoError::Parameters(format!(
                "tolerance must be positive (got {})",
                self.tolerance
            )));
        }
        if self.sample_count == 0 {
            return Err(GeoError::Parameters("sample count must be at least 1".into()));
        }
        self.target.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check does not apply to the target.
    Skip,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Skip => "SKIP",
        })
    }
}

fn ser_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_real<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub target: String,
    pub verdict: Verdict,
    /// Non-finite values are written as `null`.
    #[serde(serialize_with = "ser_real", deserialize_with = "de_real")]
    pub max_abs: f64,
    #[serde(serialize_with = "ser_real", deserialize_with = "de_real")]
    pub mean_abs: f64,
    pub argmax_point: Vec<f64>,
    pub tolerance: f64,
    pub expected: Expected,
    pub frame: FrameKind,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Report {
    /// One summary line.
    pub fn summary(&self) -> String {
        let mut line = format!(
            "{:<4} {:<21} {:<18} max {:.3e} mean {:.3e} tol {:.1e}",
            self.verdict, self.name, self.target, self.max_abs, self.mean_abs, self.tolerance
        );
        if let Expected::Fail { floor } = self.expected {
            line.push_str(&format!(" (expected > {floor:.1e})"));
        }
        if let Some(n) = &self.note {
            line.push_str(&format!("  [{n}]"));
        }
        line
    }
}

fn run_on(spec: &CheckSpec, model: &Model) -> Report {
    let expected = spec
        .expected
        .unwrap_or_else(|| checks::default_expected(&spec.name, model));
    let mut report = Report {
        name: spec.name.clone(),
        target: spec.target.clone(),
        verdict: Verdict::Skip,
        max_abs: 0.0,
        mean_abs: 0.0,
        argmax_point: Vec::new(),
        tolerance: spec.tolerance,
        expected,
        frame: FrameKind::Orthonormal,
        samples: 0,
        note: None,
    };
    match checks::evaluate(&spec.name, model, spec.sample_count, spec.seed) {
        Ok(ev) => {
            report.samples = ev.samples.len();
            let r = Residual::from_samples(ev.samples, FrameKind::Orthonormal);
            report.max_abs = r.max_abs;
            report.mean_abs = r.mean_abs;
            report.argmax_point = r.argmax_point;
            report.note = ev.note;
            report.verdict = if expected.accepts(r.max_abs, spec.tolerance) {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
        }
        Err(GeoError::NotApplicable(msg)) => report.note = Some(msg),
        Err(e) => {
            report.verdict = Verdict::Fail;
            report.max_abs = f64::INFINITY;
            report.mean_abs = f64::INFINITY;
            report.note = Some(e.to_string());
        }
    }
    report
}

/// Runs one check.
pub fn run_check(spec: &CheckSpec) -> Result<Report> {
    let target = spec.validate()?;
    Ok(run_on(spec, &Model::build(target)?))
}

/// Runs the specs (concurrently) and returns the reports in spec order.
/// Unknown names or invalid targets fail the whole suite before any check
/// runs.
pub fn run_suite(specs: &[CheckSpec]) -> Result<Vec<Report>> {
    let mut models: BTreeMap<String, Model> = BTreeMap::new();
    for spec in specs {
        let target = spec.validate()?;
        if !models.contains_key(&spec.target) {
            models.insert(spec.target.clone(), Model::build(target)?);
        }
    }
    Ok(specs
        .par_iter()
        .map(|s| run_on(s, &models[&s.target]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_is_empty() {
        assert!(run_suite(&[]).unwrap().is_empty());
    }

    #[test]
    fn unknown_names_are_registry_errors() {
        assert!(matches!(
            CheckSpec::new("nosuchcheck", "cmap:1"),
            Err(GeoError::Registry { kind: "check", .. })
        ));
        let spec = CheckSpec::new("toda", "nosuch:1").unwrap();
        assert!(matches!(run_check(&spec), Err(GeoError::Registry { .. })));
    }

    #[test]
    fn expectations() {
        assert!(Expected::Pass.accepts(1e-10, 1e-9));
        assert!(!Expected::Pass.accepts(f64::NAN, 1e-9));
        assert!(Expected::Fail { floor: 1e-3 }.accepts(0.5, 1e-9));
        assert!(!Expected::Fail { floor: 1e-3 }.accepts(f64::INFINITY, 1e-9));
        assert!(Expected::Value { value: 0.5 }.accepts(0.5 + 1e-10, 1e-9));
    }
}
