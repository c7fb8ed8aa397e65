//! The elementary deformation
//! `g_H = (1/f_Z) g_N|_{(ℍZ)⊥} + (f_H/f_Z²) g_N|_{ℍZ}`
//! assembled with the orthogonal projector
//! `𝒫_{ℍZ} = (1/g_N(Z,Z)) Σ_μ α_μ ⊗ I_μ Z`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{GeoError, Result};
use crate::jet::Jet;
use crate::sampling::{sample_points, DEFAULT_SEED};
use crate::tensorlab::algebra::{identity, lower, mat_vec, signature};
use crate::tensorlab::field::{EndoField, MetricField};

use super::rotating::RotatingKillingData;

const VALIDATION_SAMPLES: usize = 32;

/// Numerical rank of `{Z, I₁Z, I₂Z, I₃Z}` (or `{Z, I₁Z}`) at `p`.
pub fn quaternionic_rank(data: &RotatingKillingData, p: &[f64]) -> usize {
    let vecs: Vec<Vec<f64>> = data
        .quaternionic_span()
        .iter()
        .map(|v| v.values(p))
        .collect();
    let n = data.dim();
    let m = DMatrix::from_fn(n, vecs.len(), |i, j| vecs[j][i]);
    let sv = m.singular_values();
    let top = sv.iter().fold(0.0f64, |a, v| a.max(*v));
    sv.iter().filter(|&&s| s > 1e-10 * top).count()
}

/// `𝒫_{ℍZ}` jets; without the full triple the chart must be
/// four-dimensional and `ℍZ = TN`.
fn projector_jets(data: &RotatingKillingData, p: &[f64], order: usize) -> Vec<Jet> {
    let n = data.dim();
    let hk = &data.hk;
    if !hk.has_triple() {
        return identity(n, order, n);
    }
    let g = hk.metric.eval(p, order);
    let z = data.z.eval(p, order);
    let gzz = data.g_zz.jet(p, order).recip();
    let mut vecs = vec![z.clone()];
    for i in &hk.complex {
        vecs.push(mat_vec(&i.eval(p, order), &z, n));
    }
    let mut out = vec![Jet::constant(n, order, 0.0); n * n];
    for v in &vecs {
        let a = lower(&g, v, n);
        for i in 0..n {
            let vi = &v[i] * &gzz;
            for j in 0..n {
                out[i * n + j] += &vi * &a[j];
            }
        }
    }
    out
}

pub fn projector_field(data: &RotatingKillingData) -> EndoField {
    let d = data.clone();
    EndoField::new(Arc::clone(data.hk.chart()), move |p, order| {
        projector_jets(&d, p, order)
    })
}

/// Checks the preconditions of the deformation on a sample plan.
pub fn check_preconditions(data: &RotatingKillingData) -> Result<()> {
    let n = data.dim();
    if !data.hk.has_triple() && n != 4 {
        return Err(GeoError::Precondition(
            "without I₂, I₃ the deformation is defined only in dimension 4".into(),
        ));
    }
    let expected = if data.hk.has_triple() { 4 } else { 2 };
    for p in sample_points(data.hk.chart(), VALIDATION_SAMPLES, DEFAULT_SEED) {
        let fz = data.f_z.value(&p);
        let fh = data.f_h.value(&p);
        if !(fz.abs() > 1e-12) || !(fh.abs() > 1e-12) {
            return Err(GeoError::Precondition(format!(
                "f_Z = {fz:e}, f_H = {fh:e} must not vanish (at {p:?})"
            )));
        }
        let rank = quaternionic_rank(data, &p);
        if rank < expected {
            return Err(GeoError::RankDeficient { point: p, rank });
        }
    }
    Ok(())
}

/// `g_H` as a metric field.
pub fn elementary_deformation(data: &RotatingKillingData) -> Result<MetricField> {
    check_preconditions(data)?;
    let d = data.clone();
    let n = data.dim();
    Ok(MetricField::new(
        Arc::clone(data.hk.chart()),
        move |p, order| {
            let g = d.hk.metric.eval(p, order);
            let fz = d.f_z.jet(p, order);
            let fh = d.f_h.jet(p, order);
            let a = fz.recip();
            let b = &fh * &a.square();
            let pr = projector_jets(&d, p, order);
            let id = identity(n, order, n);
            let perp: Vec<Jet> = id.iter().zip(&pr).map(|(x, y)| x - y).collect();
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let mut h = Jet::constant(n, order, 0.0);
                    let mut v = Jet::constant(n, order, 0.0);
                    for k in 0..n {
                        for l in 0..n {
                            let gkl = &g[k * n + l];
                            h += &(&perp[k * n + i] * gkl) * &perp[l * n + j];
                            v += &(&pr[k * n + i] * gkl) * &pr[l * n + j];
                        }
                    }
                    out.push(&(&h * &a) + &(&v * &b));
                }
            }
            out
        },
    ))
}

/// Positive and negative eigenvalue counts of `g` at `p`.
pub fn signature_at(g: &MetricField, p: &[f64]) -> (usize, usize) {
    signature(&g.values(p), g.dim())
}
