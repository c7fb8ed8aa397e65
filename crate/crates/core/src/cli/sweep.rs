//! Parameter sweeps of closed-form quantities against their numerical value.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::sampling::linspace;
use crate::qkside::{curvature_norm_formula, gabc_metric, GabcParams};
use crate::tensorlab::curvature::{curvature_norm, scalar_curvature};
use crate::verify::target::case_representative;
use crate::verify::Target;

use super::UsageError;

pub const CSV_HEADER: &str = "param,value,quantity,formula,numeric,abs_diff";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Curvature norm against `6ν²(1 + b²(b² − 4ac)²(ρ/(bρ + 2c))⁶)`.
    CurvNorm,
    /// Scalar curvature against `12ν`.
    Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    /// Coordinate index of `(ρ, x, y, t)`.
    Coord(usize),
    A,
    B,
    C,
    K,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

const QUANTITIES: &str = "curvnorm, scalar";
const PARAMS: &str = "rho, x, y, t, a, b, c, K";

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Self::CurvNorm => "curvnorm",
            Self::Scalar => "scalar",
        }
    }
}

impl Param {
    fn name(self) -> &'static str {
        match self {
            Self::Coord(0) => "rho",
            Self::Coord(1) => "x",
            Self::Coord(2) => "y",
            Self::Coord(_) => "t",
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::K => "K",
        }
    }
}

impl FromStr for SweepSpec {
    type Err = UsageError;

    /// `quantity:param:lo:hi:steps`.
    fn from_str(s: &str) -> Result<Self, UsageError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [q, p, lo, hi, steps] = parts.as_slice() else {
            return Err(UsageError(format!(
                "sweep '{s}': expected quantity:param:lo:hi:steps"
            )));
        };
        let quantity = match *q {
            "curvnorm" | "trR2" => Quantity::CurvNorm,
            "scalar" => Quantity::Scalar,
            _ => {
                return Err(UsageError(format!(
                    "unknown sweep quantity '{q}' (available: {QUANTITIES})"
                )))
            }
        };
        let param = match *p {
            "rho" => Param::Coord(0),
            "x" => Param::Coord(1),
            "y" => Param::Coord(2),
            "t" => Param::Coord(3),
            "a" => Param::A,
            "b" => Param::B,
            "c" => Param::C,
            "K" | "k" => Param::K,
            _ => {
                return Err(UsageError(format!(
                    "unknown sweep parameter '{p}' (available: {PARAMS})"
                )))
            }
        };
        let num = |v: &str| -> Result<f64, UsageError> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| UsageError(format!("sweep '{s}': '{v}' is not a finite number")))
        };
        let steps = steps
            .parse::<usize>()
            .map_err(|_| UsageError(format!("sweep '{s}': steps must be a non-negative integer")))?;
        Ok(Self {
            quantity,
            param,
            lo: num(lo)?,
            hi: num(hi)?,
            steps,
        })
    }
}

/// One output row; `None` marks a step outside the admissible domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub value: f64,
    pub result: Option<(f64, f64)>,
}

impl Row {
    pub fn flagged(&self) -> bool {
        self.result.is_none()
    }
}

/// Family parameters behind a sweepable target.
pub fn sweep_params(target: &str) -> Result<GabcParams, UsageError> {
    let t: Target = target.parse().map_err(|e| UsageError(format!("{e}")))?;
    match t {
        Target::Gabc(p) => Ok(p),
        Target::Case(n) => case_representative(n).map_err(|e| UsageError(e.to_string())),
        other => Err(UsageError(format!(
            "sweeps need a gabc or case target (got {other})"
        ))),
    }
}

fn evaluate(q: Quantity, params: &GabcParams, p: &[f64]) -> Option<(f64, f64)> {
    if !params.chart().contains(p, 0.0) {
        return None;
    }
    let g = gabc_metric(params);
    let (formula, numeric) = match q {
        Quantity::CurvNorm => (
            curvature_norm_formula(params, p[0]).ok()?,
            curvature_norm(&g, p).ok()?,
        ),
        Quantity::Scalar => (12.0 * params.nu(), scalar_curvature(&g, p).ok()?),
    };
    (formula.is_finite() && numeric.is_finite()).then_some((formula, numeric))
}

/// Runs the sweep around the base point `(ρ₀, 0, 0, 0)`, `ρ₀` the centre of
/// the target's sampling range.
pub fn run(spec: &SweepSpec, base: &GabcParams) -> Vec<Row> {
    let (r0, r1) = base.rho_box();
    let point = [0.5 * (r0 + r1), 0.0, 0.0, 0.0];
    linspace(spec.lo, spec.hi, spec.steps)
        .into_iter()
        .map(|value| {
            let mut p = point;
            let (mut a, mut b, mut c, mut k) = (base.a, base.b, base.c, base.k);
            match spec.param {
                Param::Coord(i) => p[i] = value,
                Param::A => a = value,
                Param::B => b = value,
                Param::C => c = value,
                Param::K => k = value,
            }
            let result = GabcParams::new(a, b, c, k)
                .ok()
                .and_then(|params| evaluate(spec.quantity, &params, &p));
            Row { value, result }
        })
        .collect()
}

/// CSV with `\n` line endings; flagged rows carry `NaN`.
pub fn to_csv(spec: &SweepSpec, rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let (f, n) = r.result.unwrap_or((f64::NAN, f64::NAN));
        let _ = writeln!(
            out,
            "{},{:e},{},{:e},{:e},{:e}",
            spec.param.name(),
            r.value,
            spec.quantity.name(),
            f,
            n,
            (f - n).abs()
        );
    }
    out
}
