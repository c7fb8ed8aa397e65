//! Run configuration: TOML file, command-line flags, `QKGEO_SEED`.
//!
//! File keys (all optional):
//!
//! ```toml
//! targets = ["gabc:0,1,1,-1", "cmap:2"]
//! checks = "all"            # or a list of names
//! tolerance = 1e-8          # overrides every registry tolerance
//! samples = 200
//! seed = 42
//! out = "report.json"
//! format = "json"           # text | json
//! sweep = "curvnorm:rho:0.5:5:50"
//!
//! [tolerances]
//! einstein = 1e-6
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sampling::{DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::verify::{check_info, CheckSpec, Target, CHECKS};

use super::UsageError;

pub const SEED_ENV: &str = "QKGEO_SEED";

/// Targets used when neither the file nor the flags name any.
pub const DEFAULT_TARGETS: [&str; 3] = ["gabc:0,1,1,-1", "bf:0,1,1,-1", "cmap:2"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
enum NameList {
    One(String),
    Many(Vec<String>),
}

impl NameList {
    fn into_vec(self) -> Vec<String> {
        match self {
            Self::One(s) => split_list(&s),
            Self::Many(v) => v,
        }
    }
}

pub fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

/// Contents of a configuration file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    targets: Option<NameList>,
    checks: Option<NameList>,
    tolerance: Option<f64>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    out: Option<String>,
    format: Option<Format>,
    sweep: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))
    }
}

/// Command-line values; `None` leaves the file value in place.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub targets: Vec<String>,
    pub checks: Option<String>,
    pub tol: Vec<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub format: Option<Format>,
    pub sweep: Option<String>,
}

/// The resolved configuration, echoed in JSON reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub targets: Vec<String>,
    pub checks: Vec<String>,
    pub tolerance: Option<f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<String>,
    pub format: Format,
    pub sweep: Option<String>,
}

fn parse_tol(v: &str) -> Result<f64, UsageError> {
    match v.trim().parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(UsageError(format!(
            "tolerance must be a positive number (got '{v}')"
        ))),
    }
}

impl RunConfig {
    /// File values, then flags, then `QKGEO_SEED` (given as `env_seed`).
    pub fn resolve(
        file: FileConfig,
        flags: Overrides,
        env_seed: Option<String>,
    ) -> Result<Self, UsageError> {
        let mut targets = file.targets.map(NameList::into_vec).unwrap_or_default();
        if !flags.targets.is_empty() {
            targets = flags.targets.iter().flat_map(|t| split_targets(t)).collect();
        }
        if targets.is_empty() {
            targets = DEFAULT_TARGETS.iter().map(|s| s.to_string()).collect();
        }
        let mut checks = file
            .checks
            .map(NameList::into_vec)
            .unwrap_or_else(|| vec!["all".to_string()]);
        if let Some(c) = &flags.checks {
            checks = split_list(c);
        }
        let checks = expand_checks(&checks)?;
        let mut tolerance = file.tolerance;
        let mut tolerances = file.tolerances;
        for t in &flags.tol {
            match t.split_once('=') {
                Some((name, v)) => {
                    tolerances.insert(name.trim().to_string(), parse_tol(v)?);
                }
                None => tolerance = Some(parse_tol(t)?),
            }
        }
        if let Some(t) = tolerance {
            parse_tol(&t.to_string())?;
        }
        for (name, v) in &tolerances {
            check_info(name).map_err(|e| UsageError(e.to_string()))?;
            parse_tol(&v.to_string())?;
        }
        let mut seed = flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        if let Some(s) = env_seed {
            seed = s
                .trim()
                .parse()
                .map_err(|_| UsageError(format!("{SEED_ENV} must be an unsigned integer (got '{s}')")))?;
        }
        let samples = flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(UsageError("samples must be at least 1".into()));
        }
        for t in &targets {
            Target::from_str(t).map_err(|e| UsageError(e.to_string()))?;
        }
        Ok(Self {
            targets,
            checks,
            tolerance,
            tolerances,
            samples,
            seed,
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or_default(),
            sweep: flags.sweep.or(file.sweep),
        })
    }

    /// One spec per (target, check), targets outermost.
    pub fn specs(&self) -> Vec<CheckSpec> {
        let mut out = Vec::new();
        for t in &self.targets {
            for c in &self.checks {
                let mut s = CheckSpec::new(c, t)
                    .expect("check names validated")
                    .with_samples(self.samples)
                    .with_seed(self.seed);
                if let Some(tol) = self.tolerances.get(c).copied().or(self.tolerance) {
                    s = s.with_tolerance(tol);
                }
                out.push(s);
            }
        }
        out
    }
}

/// Splits `a;b` and also tolerates several targets in one flag value when
/// separated by whitespace (commas belong to the parameters).
fn split_targets(s: &str) -> Vec<String> {
    s.split([';', ' '])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

fn expand_checks(names: &[String]) -> Result<Vec<String>, UsageError> {
    if names.iter().any(|n| n == "all") {
        return Ok(CHECKS.iter().map(|c| c.name.to_string()).collect());
    }
    if names.is_empty() {
        return Err(UsageError("no checks selected".into()));
    }
    for n in names {
        check_info(n).map_err(|e| UsageError(e.to_string()))?;
    }
    Ok(names.to_vec())
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Text => "text",
            Self::Json => "json",
        })
    }
}
