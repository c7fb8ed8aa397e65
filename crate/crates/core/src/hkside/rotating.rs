//! Rotating Killing data `(Z, f_Z, f_H, ψ, ω₁, ω_H, I_H)`.
//!
//! The Hamiltonian `f_Z` is fixed up to a constant by `ι_Z ω₁ = −df_Z`;
//! shifting it by `c` shifts `f_H = f_Z + g(Z, Z)` by the same constant.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::jet::Jet;
use crate::sampling::{sample_points, DEFAULT_SEED};
use crate::tensorlab::algebra::{
    apply_field, commutator, compose_form, endo_frame_norm, expand_form, form_frame_norm,
    lower_field, matmul_values, pairing_field,
};
use crate::tensorlab::complex::almost_complex_residual;
use crate::tensorlab::connection::{metric_at, nabla_vector_field, orthonormal_frame};
use crate::tensorlab::field::{EndoField, FormField, ScalarField, VectorField};
use crate::tensorlab::forms::{exterior_derivative, exterior_derivative_field, interior_at, wedge};
use crate::tensorlab::frame::{max_component, Frame, FrameKind, Residual, Slot};
use crate::tensorlab::lie::{lie_derivative_endo, lie_derivative_metric};

use super::HyperKahler;

const VALIDATION_SAMPLES: usize = 32;

#[derive(Clone, Debug)]
pub struct RotatingKillingData {
    pub hk: HyperKahler,
    pub z: VectorField,
    pub f_z: ScalarField,
    pub f_h: ScalarField,
    /// `g_N(Z, Z) = f_H − f_Z`.
    pub g_zz: ScalarField,
    /// Pointwise least-squares solution of `d(g_N(Z,Z)) = 2ψ df_Z`.
    pub psi: ScalarField,
    /// `α₀ = g_N(Z, −)`.
    pub alpha0: FormField,
    /// `ω_H = ω₁ + dα₀`.
    pub omega_h: FormField,
    pub nabla_z: EndoField,
    /// `I_H = I₁ + 2∇Z`.
    pub i_h: EndoField,
    pub c_offset: f64,
}

/// Assembles the rotating data; `f_z` is the unshifted Hamiltonian.
pub fn rotating_data(
    hk: &HyperKahler,
    z: &VectorField,
    f_z: &ScalarField,
    c_offset: f64,
) -> Result<RotatingKillingData> {
    let chart = Arc::clone(hk.chart());
    let n = hk.dim();
    let g = hk.metric.clone();
    let g_zz = pairing_field(&g, z, z);
    for p in sample_points(&chart, VALIDATION_SAMPLES, DEFAULT_SEED) {
        let v = g_zz.value(&p);
        if !(v.abs() > 1e-12) {
            return Err(GeoError::Precondition(format!(
                "g_N(Z, Z) = {v:e} vanishes at {p:?}"
            )));
        }
    }
    let base = f_z.clone();
    let f_z = ScalarField::new(Arc::clone(&chart), move |p, order| {
        vec![&base.jet(p, order) + c_offset]
    })
    .with_max_order(f_z.max_order());
    let (fz, gzz) = (f_z.clone(), g_zz.clone());
    let f_h = ScalarField::new(Arc::clone(&chart), move |p, order| {
        vec![&fz.jet(p, order) + &gzz.jet(p, order)]
    })
    .with_max_order(f_z.max_order().min(g_zz.max_order()));
    let (fz, gzz) = (f_z.clone(), g_zz.clone());
    let psi = ScalarField::new(Arc::clone(&chart), move |p, order| {
        let a = gzz.jet(p, order + 1);
        let b = fz.jet(p, order + 1);
        let mut num = Jet::constant(n, order, 0.0);
        let mut den = Jet::constant(n, order, 0.0);
        for i in 0..n {
            let ai = a.partial(i);
            let bi = &b.partial(i) * 2.0;
            num += &ai * &bi;
            den += &bi * &bi;
        }
        vec![&num / &den]
    })
    .with_max_order(f_z.max_order().min(g_zz.max_order()).saturating_sub(1));
    let alpha0 = lower_field(&g, z);
    let d_alpha0 = exterior_derivative_field(&alpha0);
    let omega1 = hk.omega1().clone();
    let omega_h = FormField::new(Arc::clone(&chart), 2, move |p, order| {
        let a = omega1.eval(p, order);
        let b = d_alpha0.eval(p, order);
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    });
    let nabla_z = nabla_vector_field(&g, z);
    let (i1, nz) = (hk.i1().clone(), nabla_z.clone());
    let i_h = EndoField::new(Arc::clone(&chart), move |p, order| {
        let a = i1.eval(p, order);
        let b = nz.eval(p, order);
        a.iter().zip(&b).map(|(x, y)| x + &(y * 2.0)).collect()
    });
    Ok(RotatingKillingData {
        hk: hk.clone(),
        z: z.clone(),
        f_z,
        f_h,
        g_zz,
        psi,
        alpha0,
        omega_h,
        nabla_z,
        i_h,
        c_offset,
    })
}

fn gradient(f: &ScalarField, p: &[f64]) -> Vec<f64> {
    f.jet(p, 1).gradient()
}

impl RotatingKillingData {
    pub fn dim(&self) -> usize {
        self.hk.dim()
    }

    pub fn frame(&self, p: &[f64]) -> Result<Frame> {
        orthonormal_frame(&self.hk.metric, p)
    }

    /// `I_μ Z` for `μ = 0..3` (or `μ = 0, 1` without the full triple).
    pub fn quaternionic_span(&self) -> Vec<VectorField> {
        let mut out = vec![self.z.clone()];
        for i in &self.hk.complex {
            out.push(apply_field(i, &self.z));
        }
        out
    }

    /// `α_μ = ω_μ(Z, −) = g_N(I_μ Z, −)`.
    pub fn alphas(&self) -> Vec<FormField> {
        self.quaternionic_span()
            .iter()
            .map(|v| lower_field(&self.hk.metric, v))
            .collect()
    }
}

/// `ψ` at `p` and the orthonormal-frame size of `d(g(Z,Z)) − 2ψ df_Z`.
pub fn psi_fit(data: &RotatingKillingData, p: &[f64]) -> Result<(f64, f64)> {
    let frame = data.frame(p)?;
    let dfz = gradient(&data.f_z, p);
    let norm = dfz.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 1e-12) {
        return Err(GeoError::MomentMapDegenerate {
            point: p.to_vec(),
            norm,
        });
    }
    let dgzz = gradient(&data.g_zz, p);
    let psi = data.psi.value(p);
    let r: Vec<f64> = dgzz
        .iter()
        .zip(&dfz)
        .map(|(a, b)| a - 2.0 * psi * b)
        .collect();
    Ok((psi, form_frame_norm(&r, 1, &frame)))
}

/// `df_H ∧ df_Z` at `p`.
pub fn integrability_criterion(data: &RotatingKillingData, p: &[f64]) -> Result<Residual> {
    data.hk.chart().check(p)?;
    let frame = data.frame(p)?;
    let n = data.dim();
    let w = wedge(&gradient(&data.f_h, p), 1, &gradient(&data.f_z, p), 1, n);
    Ok(Residual::single(
        p,
        form_frame_norm(&w, 2, &frame),
        FrameKind::Orthonormal,
    ))
}

/// Distance of `∇_Z Z` from `span(Z, I₁Z)`.
pub fn nabla_zz_residual(data: &RotatingKillingData, p: &[f64]) -> Result<f64> {
    let frame = data.frame(p)?;
    let g = metric_at(&data.hk.metric, p)?;
    let n = data.dim();
    let z = data.z.values(p);
    let nz = data.nabla_z.values(p);
    let i1 = data.hk.i1().values(p);
    let v: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| nz[i * n + j] * z[j]).sum())
        .collect();
    let iz: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| i1[i * n + j] * z[j]).sum())
        .collect();
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        (0..n)
            .map(|i| (0..n).map(|j| g[i * n + j] * a[i] * b[j]).sum::<f64>())
            .sum()
    };
    let zz = ip(&z, &z);
    let (cz, ci) = (ip(&v, &z) / zz, ip(&v, &iz) / zz);
    let r: Vec<f64> = (0..n).map(|i| v[i] - cz * z[i] - ci * iz[i]).collect();
    Ok(max_component(&frame.transform(&r, &[Slot::Up])))
}

/// Named residuals of the rotating Killing field identities.
pub fn rotating_identities(data: &RotatingKillingData, p: &[f64]) -> Result<Vec<(String, f64)>> {
    let hk = &data.hk;
    let n = data.dim();
    let frame = data.frame(p)?;
    let mut out = Vec::new();
    let lg = lie_derivative_metric(&hk.metric, &data.z, p)?;
    out.push((
        "L_Z g".to_string(),
        max_component(&frame.transform(&lg, &[Slot::Down, Slot::Down])),
    ));
    let li: Vec<Vec<f64>> = hk
        .complex
        .iter()
        .map(|i| lie_derivative_endo(i, &data.z, p))
        .collect::<Result<_>>()?;
    out.push(("L_Z I1".to_string(), endo_frame_norm(&li[0], &frame)));
    if hk.has_triple() {
        let i2 = hk.complex[1].values(p);
        let i3 = hk.complex[2].values(p);
        let r2: Vec<f64> = li[1].iter().zip(&i3).map(|(a, b)| a - b).collect();
        let r3: Vec<f64> = li[2].iter().zip(&i2).map(|(a, b)| a + b).collect();
        out.push(("L_Z I2 - I3".to_string(), endo_frame_norm(&r2, &frame)));
        out.push(("L_Z I3 + I2".to_string(), endo_frame_norm(&r3, &frame)));
        let i1 = hk.complex[0].values(p);
        let q: Vec<f64> = matmul_values(&i1, &i2, n)
            .iter()
            .zip(&i3)
            .map(|(a, b)| a - b)
            .collect();
        out.push(("I1 I2 - I3".to_string(), endo_frame_norm(&q, &frame)));
    }
    for (k, (i, w)) in hk.complex.iter().zip(&hk.forms).enumerate() {
        out.push((
            format!("I{}^2 + 1", k + 1),
            almost_complex_residual(&i.values(p), n),
        ));
        out.push((
            format!("d omega{}", k + 1),
            form_frame_norm(&exterior_derivative(w, p)?, 3, &frame),
        ));
    }
    let iz = interior_at(&data.z, hk.omega1(), p)?;
    let dfz = gradient(&data.f_z, p);
    let r: Vec<f64> = iz.iter().zip(&dfz).map(|(a, b)| a + b).collect();
    out.push((
        "iota_Z omega1 + df_Z".to_string(),
        form_frame_norm(&r, 1, &frame),
    ));
    Ok(out)
}

/// Residuals of `g(I_H·,·) = ω_H`, `g`-skewness of `I_H`, and `[I_H, I_k]`.
pub fn prop_ih_checks(data: &RotatingKillingData, p: &[f64]) -> Result<Vec<(String, f64)>> {
    let n = data.dim();
    let frame = data.frame(p)?;
    let g = metric_at(&data.hk.metric, p)?;
    let ih = data.i_h.values(p);
    let s = compose_form(&g, &ih, n);
    let wh = expand_form(&data.omega_h.values(p), 2, n);
    let dd = [Slot::Down, Slot::Down];
    let compat: Vec<f64> = s.iter().zip(&wh).map(|(a, b)| a - b).collect();
    let skew: Vec<f64> = (0..n * n).map(|k| s[k] + s[(k % n) * n + k / n]).collect();
    let mut out = vec![
        (
            "g(I_H.,.) - omega_H".to_string(),
            max_component(&frame.transform(&compat, &dd)),
        ),
        (
            "g(I_H.,.) + g(.,I_H.)".to_string(),
            max_component(&frame.transform(&skew, &dd)),
        ),
    ];
    for (k, i) in data.hk.complex.iter().enumerate() {
        let c = commutator(&ih, &i.values(p), n);
        out.push((format!("[I_H, I{}]", k + 1), endo_frame_norm(&c, &frame)));
    }
    Ok(out)
}
