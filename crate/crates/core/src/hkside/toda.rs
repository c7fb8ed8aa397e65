//! Solutions of the continuous Toda equation `(∂x² + ∂y²)u + 2∂ρ²(eᵘ) = 0`.
//!
//! `u` lives on the four-dimensional chart `(ρ, x, y, t)` and must not depend
//! on `t`, so that the Boyer–Finley and Przanowski–Tod metrics built from it
//! share that chart.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::jet::Jet;
use crate::sampling::{sample_points, DEFAULT_SEED};
use crate::tensorlab::chart::Chart;
use crate::tensorlab::field::ScalarField;

/// Tolerance on the Toda residual accepted by [`TodaSolution::new`].
pub const TODA_TOL: f64 = 1e-8;

/// Points used to validate a candidate solution.
const VALIDATION_SAMPLES: usize = 64;

/// Coordinate indices on the `(ρ, x, y, t)` chart.
pub const RHO: usize = 0;
pub const X: usize = 1;
pub const Y: usize = 2;
pub const T: usize = 3;

#[derive(Clone, Debug)]
pub struct TodaSolution {
    u: ScalarField,
    k: f64,
}

/// `(∂x² + ∂y²)u + 2∂ρ²(eᵘ)` from a jet of `u` of order ≥ 2.
pub fn toda_residual_jet(u: &Jet) -> f64 {
    let e = u.exp();
    u.derivative(&[X, X]) + u.derivative(&[Y, Y]) + 2.0 * e.derivative(&[RHO, RHO])
}

pub fn toda_residual(u: &ScalarField, p: &[f64]) -> Result<f64> {
    u.chart().check(p)?;
    u.require_order(2)?;
    Ok(toda_residual_jet(&u.jet(p, 2)))
}

impl TodaSolution {
    /// Validates the Toda equation, `t`-independence and the constant nonzero
    /// sign of `ρu_ρ − 2` on a sample plan.
    pub fn new(u: ScalarField, k: f64) -> Result<Self> {
        if u.dim() != 4 {
            return Err(GeoError::UnsupportedDimension {
                expected: 4,
                got: u.dim(),
            });
        }
        if k == 0.0 || !k.is_finite() {
            return Err(GeoError::Parameters("K must be a nonzero real".into()));
        }
        let points = sample_points(u.chart(), VALIDATION_SAMPLES, DEFAULT_SEED);
        if points.is_empty() {
            return Err(GeoError::Parameters(format!(
                "chart '{}' has no sample points",
                u.chart().name()
            )));
        }
        let mut worst = 0.0f64;
        for p in &points {
            let j = u.jet(p, 2);
            let r = toda_residual_jet(&j);
            worst = worst.max(if r.is_nan() { f64::INFINITY } else { r.abs() });
            worst = worst.max(j.derivative(&[T]).abs());
        }
        if worst > TODA_TOL {
            return Err(GeoError::InvalidSolution { residual: worst });
        }
        let mut p_sign = 0.0;
        for p in &points {
            let u_rho = u.jet(p, 1).derivative(&[RHO]);
            let ps = (p[RHO] * u_rho - 2.0).signum();
            if p_sign == 0.0 {
                p_sign = ps;
            }
            if ps != p_sign || p[RHO] * u_rho == 2.0 {
                return Err(GeoError::Precondition(format!(
                    "sign of ρu_ρ − 2 changes on the domain (at {p:?})"
                )));
            }
        }
        Ok(Self { u, k })
    }

    /// Checks that `K u_ρ` has a constant nonzero sign, the definiteness
    /// condition of the Boyer–Finley metric.
    pub fn check_boyer_finley(&self) -> Result<()> {
        let mut sign = 0.0;
        for p in sample_points(self.chart(), VALIDATION_SAMPLES, DEFAULT_SEED) {
            let s = (self.k * self.u.jet(&p, 1).derivative(&[RHO])).signum();
            if sign == 0.0 {
                sign = s;
            }
            if s != sign || s == 0.0 || s.is_nan() {
                return Err(GeoError::Precondition(format!(
                    "sign of K u_ρ changes on the domain (at {p:?})"
                )));
            }
        }
        Ok(())
    }

    /// Skips validation; used for perturbed negative controls.
    pub fn new_unchecked(u: ScalarField, k: f64) -> Self {
        Self { u, k }
    }

    /// `u` given by a formula in `(ρ, x, y)`.
    pub fn from_formula<F>(chart: Arc<Chart>, k: f64, formula: F) -> Result<Self>
    where
        F: Fn(&Jet, &Jet, &Jet) -> Jet + Send + Sync + 'static,
    {
        Self::new(
            ScalarField::from_jets(chart, move |c| vec![formula(&c[RHO], &c[X], &c[Y])]),
            k,
        )
    }

    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.u.chart()
    }

    pub fn residual(&self, p: &[f64]) -> Result<f64> {
        toda_residual(&self.u, p)
    }

    /// `P = K(ρ u_ρ − 2)` as a field.
    pub fn p_field(&self) -> ScalarField {
        let u = self.u.clone();
        let k = self.k;
        let max = u.max_order().saturating_sub(1);
        ScalarField::new(Arc::clone(u.chart()), move |p, order| {
            let j = u.jet(p, order + 1);
            let rho = Jet::variable(4, order, p[RHO], RHO);
            vec![&(&(&rho * &j.partial(RHO)) - 2.0) * k]
        })
        .with_max_order(max)
    }
}

/// The `(ρ, x, y, t)` chart with domain `ρ > 0` intersected with `extra`.
pub fn rho_chart<F>(name: &str, sample_box: Vec<(f64, f64)>, extra: F) -> Chart
where
    F: Fn(&[f64], f64) -> bool + Send + Sync + 'static,
{
    Chart::new(name, &["rho", "x", "y", "t"], sample_box, move |p, m| {
        p[RHO] > m && extra(p, m)
    })
}
