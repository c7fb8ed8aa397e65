//! Killing fields of `g^{a,b,c}` and the isomorphism type of the algebra
//! they span.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::hkside::toda::{T, X, Y};
use crate::tensorlab::connection::metric_at;
use crate::tensorlab::field::{MetricField, VectorField};
use crate::tensorlab::frame::{Frame, Slot};
use crate::tensorlab::lie::{lie_bracket, lie_derivative_metric};

use super::GabcParams;

/// Eigenvalues of the restricted Killing form below this are zero.
pub const KILLING_FORM_TOL: f64 = 1e-6;
/// Singular values of the derived-algebra spanning set below this are zero.
const RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraLabel {
    /// `𝔬(2) ⋉ 𝔥𝔢𝔦𝔰₃`: the Killing form degenerates on the derived algebra.
    O2Heis3,
    /// `𝔲(2)`: negative definite on the derived algebra.
    U2,
    /// `𝔲(1,1)`: indefinite on the derived algebra.
    U11,
}

impl AlgebraLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::O2Heis3 => "o2_heis3",
            Self::U2 => "u2",
            Self::U11 => "u11",
        }
    }

    /// Label expected from the sign of `a`.
    pub fn expected(a: f64) -> Self {
        if a == 0.0 {
            Self::O2Heis3
        } else if a > 0.0 {
            Self::U2
        } else {
            Self::U11
        }
    }
}

impl fmt::Display for AlgebraLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct KillingCatalog {
    pub names: Vec<&'static str>,
    pub fields: Vec<VectorField>,
}

/// `Re V`, `Im V`, `V₃`, `V₄` in `(ρ, x, y, t)`.
pub fn killing_fields(params: &GabcParams) -> KillingCatalog {
    let chart = params.chart();
    let (a, kb) = (params.a, params.k * params.b);
    let re = VectorField::from_jets(chart.clone(), move |c| {
        let (x, y) = (&c[X], &c[Y]);
        let r2 = &x.square() - &y.square();
        let mut v = vec![x.zero_like(); 4];
        v[X] = &(&r2 * (0.25 * a)) + 0.5;
        v[Y] = &(x * y) * (0.5 * a);
        v[T] = y * (-0.5 * kb);
        v
    });
    let im = VectorField::from_jets(chart.clone(), move |c| {
        let (x, y) = (&c[X], &c[Y]);
        let r2 = &x.square() - &y.square();
        let mut v = vec![x.zero_like(); 4];
        v[X] = &(x * y) * (-0.5 * a);
        v[Y] = &(&r2 * (0.25 * a)) - 0.5;
        v[T] = x * (-0.5 * kb);
        v
    });
    let v3 = VectorField::from_jets(chart.clone(), move |c| {
        let mut v = vec![c[0].zero_like(); 4];
        v[X] = &c[Y] * (-0.5 * a);
        v[Y] = &c[X] * (0.5 * a);
        v[T] = c[0].lift(-0.5 * kb);
        v
    });
    let v4 = VectorField::from_jets(chart, move |c| {
        let mut v = vec![c[0].zero_like(); 4];
        v[X] = &c[Y] * 0.5;
        v[Y] = &c[X] * -0.5;
        v
    });
    KillingCatalog {
        names: vec!["ReV", "ImV", "V3", "V4"],
        fields: vec![re, im, v3, v4],
    }
}

/// Largest orthonormal-frame component of `L_V g` over the catalog.
pub fn killing_residual(g: &MetricField, cat: &KillingCatalog, p: &[f64]) -> Result<f64> {
    let frame = Frame::orthonormal(&metric_at(g, p)?, g.dim())?;
    let mut worst = 0.0f64;
    for v in &cat.fields {
        let l = lie_derivative_metric(g, v, p)?;
        let t = frame.transform(&l, &[Slot::Down, Slot::Down]);
        worst = t.iter().fold(worst, |m, x| m.max(x.abs()));
    }
    Ok(worst)
}

/// Structure constants `[V_i, V_j] = c^k_ij V_k` (at `(i*m + j)*m + k`)
/// fitted by least squares over `points`, with the fit residual.
pub fn structure_constants(cat: &KillingCatalog, points: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let m = cat.fields.len();
    if points.is_empty() {
        return Err(GeoError::Precondition("no sample points".into()));
    }
    let n = cat.fields[0].dim();
    let rows = points.len() * n;
    let mut a = DMatrix::<f64>::zeros(rows, m);
    for (pi, p) in points.iter().enumerate() {
        for (k, v) in cat.fields.iter().enumerate() {
            for (i, x) in v.values(p).iter().enumerate() {
                a[(pi * n + i, k)] = *x;
            }
        }
    }
    let svd = a.clone().svd(true, true);
    let mut c = vec![0.0; m * m * m];
    let mut residual = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let mut rhs = DVector::<f64>::zeros(rows);
            for (pi, p) in points.iter().enumerate() {
                for (r, x) in lie_bracket(&cat.fields[i], &cat.fields[j], p)?
                    .iter()
                    .enumerate()
                {
                    rhs[pi * n + r] = *x;
                }
            }
            let sol = svd
                .solve(&rhs, 1e-12)
                .map_err(|e| GeoError::Precondition(e.to_string()))?;
            residual = residual.max((&a * &sol - &rhs).amax());
            for k in 0..m {
                c[(i * m + j) * m + k] = sol[k];
            }
        }
    }
    Ok((c, residual))
}

/// Classifies the algebra from its structure constants via the Killing
/// form restricted to the derived algebra.
pub fn classify_algebra(c: &[f64], m: usize) -> Result<AlgebraLabel> {
    // ad(X_i)^k_j = c^k_ij
    let ad = |i: usize| DMatrix::from_fn(m, m, |k, j| c[(i * m + j) * m + k]);
    let ads: Vec<DMatrix<f64>> = (0..m).map(ad).collect();
    let killing = DMatrix::from_fn(m, m, |i, j| (&ads[i] * &ads[j]).trace());
    // columns: the brackets [X_i, X_j]
    let span = DMatrix::from_fn(m, m * m, |k, col| c[col * m + k]);
    let svd = span.svd(true, false);
    let u = svd
        .u
        .ok_or_else(|| GeoError::Precondition("SVD failed".into()))?;
    let scale = svd.singular_values.max().max(1.0);
    let basis: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&r| svd.singular_values[r] > RANK_TOL * scale)
        .collect();
    if basis.is_empty() {
        return Err(GeoError::Precondition("algebra is abelian".into()));
    }
    let d = DMatrix::from_fn(m, basis.len(), |r, q| u[(r, basis[q])]);
    let restricted = d.transpose() * killing * &d;
    let eig = SymmetricEigen::new(restricted).eigenvalues;
    let tol = KILLING_FORM_TOL * eig.amax().max(1.0);
    if eig.iter().any(|e| e.abs() <= tol) {
        Ok(AlgebraLabel::O2Heis3)
    } else if eig.iter().all(|e| *e < 0.0) {
        Ok(AlgebraLabel::U2)
    } else if eig.iter().all(|e| *e > 0.0) {
        Err(GeoError::Precondition(
            "positive definite Killing form on the derived algebra".into(),
        ))
    } else {
        Ok(AlgebraLabel::U11)
    }
}

/// Killing residual at `points`, bracket-closure residual and label.
pub fn classify_params(
    params: &GabcParams,
    points: &[Vec<f64>],
) -> Result<(f64, f64, AlgebraLabel)> {
    let g = super::gabc_metric(params);
    let cat = killing_fields(params);
    let mut worst = 0.0f64;
    for p in points {
        worst = worst.max(killing_residual(&g, &cat, p)?);
    }
    let (c, closure) = structure_constants(&cat, points)?;
    Ok((worst, closure, classify_algebra(&c, cat.fields.len())?))
}
