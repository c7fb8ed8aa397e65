//! The two-form `σ̃` (twist of the fundamental form of the integrable
//! structure `J̃₁`), its exterior derivative, and the conformal factor of
//! the four-dimensional conformally Kähler metric.
//!
//! With `α_μ = ω_μ(Z, −)`:
//! `σ̃ = f_H/(f_Z² g(Z,Z)) (−α₀∧α₁ + α₂∧α₃) + (1/f_Z)(ω₁)_{(ℍZ)⊥}`.
//! In dimension four `ℍZ = TN` and
//! `σ̃ = (f_H/f_Z²) ω₁ − 2 (f_H/f_Z²) df_Z∧α₀ / (f_H − f_Z)`.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::jet::Jet;
use crate::quad::adaptive;
use crate::sampling::linspace;
use crate::tensorlab::algebra::{form_frame_norm, identity, lower, mat_vec, truncate_all};
use crate::tensorlab::field::{FormField, ScalarField};
use crate::tensorlab::forms::{
    d_scalar, exterior_derivative, interior, interior_at, two_form_from_matrix, two_form_matrix,
    wedge,
};

use super::deformation::projector_field;
use super::rotating::{psi_fit, RotatingKillingData};

/// Largest ψ-fit residual for which ψ counts as defined.
pub const CRITERION_TOL: f64 = 1e-6;

fn require_criterion(data: &RotatingKillingData, p: &[f64]) -> Result<()> {
    let (_, fit) = psi_fit(data, p)?;
    if fit > CRITERION_TOL {
        return Err(GeoError::CriterionViolated { residual: fit });
    }
    Ok(())
}

/// `(ω₁)_{(ℍZ)⊥} = ω₁(𝒫⊥·, 𝒫⊥·)`.
pub fn omega1_perp_field(data: &RotatingKillingData) -> FormField {
    let proj = projector_field(data);
    let w1 = data.hk.omega1().clone();
    let n = data.dim();
    FormField::new(Arc::clone(data.hk.chart()), 2, move |p, order| {
        let pr = proj.eval(p, order);
        let id = identity(n, order, n);
        let perp: Vec<Jet> = id.iter().zip(&pr).map(|(a, b)| a - b).collect();
        let w = two_form_matrix(&w1.eval(p, order), n);
        let mut m = vec![Jet::constant(n, order, 0.0); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let mut acc = Jet::constant(n, order, 0.0);
                for k in 0..n {
                    for l in 0..n {
                        acc += &(&perp[k * n + i] * &w[k * n + l]) * &perp[l * n + j];
                    }
                }
                m[i * n + j] = acc;
            }
        }
        two_form_from_matrix(&m, n)
    })
}

/// `α_μ` jets for `μ = 0..3` (or `0, 1`).
fn alpha_jets(data: &RotatingKillingData, p: &[f64], order: usize) -> Vec<Vec<Jet>> {
    let n = data.dim();
    let g = data.hk.metric.eval(p, order);
    let z = data.z.eval(p, order);
    let mut out = vec![lower(&g, &z, n)];
    for i in &data.hk.complex {
        out.push(lower(&g, &mat_vec(&i.eval(p, order), &z, n), n));
    }
    out
}

/// `σ̃` as a two-form field.
pub fn sigma_tilde_field(data: &RotatingKillingData) -> Result<FormField> {
    let n = data.dim();
    let chart = Arc::clone(data.hk.chart());
    let d = data.clone();
    if data.hk.has_triple() {
        let perp = omega1_perp_field(data);
        return Ok(FormField::new(chart, 2, move |p, order| {
            let fz = d.f_z.jet(p, order);
            let fh = d.f_h.jet(p, order);
            let gzz = d.g_zz.jet(p, order);
            let c1 = &fh / &(&fz.square() * &gzz);
            let c2 = fz.recip();
            let a = alpha_jets(&d, p, order);
            let a01 = wedge(&a[0], 1, &a[1], 1, n);
            let a23 = wedge(&a[2], 1, &a[3], 1, n);
            let w = perp.eval(p, order);
            (0..a01.len())
                .map(|k| &(&c1 * &(&a23[k] - &a01[k])) + &(&c2 * &w[k]))
                .collect()
        }));
    }
    if n != 4 {
        return Err(GeoError::Precondition(
            "σ̃ needs the full quaternionic triple outside dimension 4".into(),
        ));
    }
    Ok(FormField::new(chart, 2, move |p, order| {
        let fz = d.f_z.jet(p, order + 1);
        let dfz = d_scalar(&fz);
        let fz = fz.truncate(order);
        let fh = d.f_h.jet(p, order);
        let c = &fh / &fz.square();
        let c2 = &(&c * -2.0) / &(&fh - &fz);
        let a0 = alpha_jets(&d, p, order).swap_remove(0);
        let dfa = wedge(&dfz, 1, &a0, 1, n);
        let w1 = d.hk.omega1().eval(p, order);
        (0..w1.len())
            .map(|k| &(&c * &w1[k]) + &(&c2 * &dfa[k]))
            .collect()
    }))
}

/// The displayed closed-form expression for `dσ̃` (full triple only).
pub fn d_sigma_tilde_formula(data: &RotatingKillingData, p: &[f64]) -> Result<Vec<f64>> {
    if !data.hk.has_triple() {
        return Err(GeoError::Precondition(
            "the dσ̃ formula needs I₂, I₃ (α₂, α₃, ω₂, ω₃)".into(),
        ));
    }
    data.hk.chart().check(p)?;
    require_criterion(data, p)?;
    let n = data.dim();
    let fz = data.f_z.value(p);
    let fh = data.f_h.value(p);
    let gzz = data.g_zz.value(p);
    let psi = data.psi.value(p);
    let a: Vec<Vec<f64>> = alpha_jets(data, p, 1)
        .iter()
        .map(|v| v.iter().map(Jet::value).collect())
        .collect();
    let da0 = exterior_derivative(&data.alpha0, p)?;
    let w2 = data.hk.forms[1].values(p);
    let w3 = data.hk.forms[2].values(p);
    let perp_field = omega1_perp_field(data);
    let perp = perp_field.values(p);
    let d_perp = exterior_derivative(&perp_field, p)?;
    let c1 = fh / (fz * fz * gzz);
    let k = -(1.0 + 2.0 * psi) / fh + 2.0 / fz + 2.0 * psi / (fh - fz);
    let a23 = wedge(&a[2], 1, &a[3], 1, n);
    let inner: Vec<f64> = a23.iter().zip(&da0).map(|(x, y)| k * x - y).collect();
    let t1 = wedge(&inner, 2, &a[1], 1, n);
    let t2a = wedge(&a[2], 1, &w2, 2, n);
    let t2b = wedge(&a[3], 1, &w3, 2, n);
    let t3 = wedge(&a[1], 1, &perp, 2, n);
    Ok((0..t1.len())
        .map(|i| c1 * t1[i] + c1 * (t2a[i] + t2b[i]) + t3[i] / (fz * fz) + d_perp[i] / fz)
        .collect())
}

/// `ι_Z σ̃ − (f_H/f_Z²) df_Z` at `p` (values).
pub fn iota_z_sigma_residual(
    data: &RotatingKillingData,
    sigma: &FormField,
    p: &[f64],
) -> Result<Vec<f64>> {
    let iz = interior_at(&data.z, sigma, p)?;
    let fz = data.f_z.jet(p, 1);
    let fh = data.f_h.value(p);
    let c = fh / (fz.value() * fz.value());
    Ok(iz
        .iter()
        .zip(fz.gradient())
        .map(|(a, b)| a - c * b)
        .collect())
}

/// `ξ = 2/f_Z − (2 + 4ψ)/f_H + (4 + 4ψ)/(f_H − f_Z)`.
pub fn xi_formula(psi: f64, f_z: f64, f_h: f64) -> f64 {
    2.0 / f_z - (2.0 + 4.0 * psi) / f_h + (4.0 + 4.0 * psi) / (f_h - f_z)
}

fn xi_jet(psi: &Jet, fz: &Jet, fh: &Jet) -> Jet {
    let a = &fz.recip() * 2.0;
    let b = &(&(psi * 4.0) + 2.0) / fh;
    let c = &(&(psi * 4.0) + 4.0) / &(fh - fz);
    &(&a - &b) + &c
}

/// `ξ` at `p`.
pub fn xi_at(data: &RotatingKillingData, p: &[f64]) -> Result<f64> {
    data.hk.chart().check(p)?;
    require_criterion(data, p)?;
    Ok(xi_formula(
        data.psi.value(p),
        data.f_z.value(p),
        data.f_h.value(p),
    ))
}

/// Scans `f_Z`, `f_H` and `f_H − f_Z` along `ρ ∈ interval` (other
/// coordinates at `reference`) for zeros.
fn pole_scan(data: &RotatingKillingData, interval: (f64, f64), reference: &[f64]) -> Result<()> {
    let mut prev: Option<[f64; 3]> = None;
    for r in linspace(interval.0, interval.1, 257) {
        let mut q = reference.to_vec();
        q[0] = r;
        let fz = data.f_z.value(&q);
        let fh = data.f_h.value(&q);
        let vals = [fz, fh, fh - fz];
        let names = ["f_Z", "f_H", "f_H - f_Z"];
        for k in 0..3 {
            let zero = !(vals[k].abs() > 1e-12);
            let flip = prev.is_some_and(|pv| pv[k].signum() != vals[k].signum());
            if zero || flip {
                return Err(GeoError::Pole {
                    factor: names[k].to_string(),
                    at: r,
                });
            }
        }
        prev = Some(vals);
    }
    Ok(())
}

/// `φ` with `dφ = ξ df_Z` and `φ = 0` on `ρ = ρ₀`, by adaptive quadrature
/// along the first coordinate (dimension 4 only).
pub fn phi_by_quadrature(
    data: &RotatingKillingData,
    interval: (f64, f64),
    rho0: f64,
) -> Result<ScalarField> {
    if data.dim() != 4 {
        return Err(GeoError::UnsupportedDimension {
            expected: 4,
            got: data.dim(),
        });
    }
    let chart = Arc::clone(data.hk.chart());
    let reference: Vec<f64> = chart
        .sample_box()
        .iter()
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    pole_scan(data, interval, &reference)?;
    let d = data.clone();
    let n = 4;
    Ok(ScalarField::new(chart, move |p, order| {
        let integrand = |r: f64| {
            let mut q = p.to_vec();
            q[0] = r;
            let fz = d.f_z.jet(&q, 1);
            let fh = d.f_h.value(&q);
            xi_formula(d.psi.value(&q), fz.value(), fh) * fz.derivative(&[0])
        };
        let value = adaptive(integrand, rho0, p[0], 1e-13).map_or(f64::NAN, |r| r.value);
        if order == 0 {
            return vec![Jet::constant(n, 0, value)];
        }
        let fz = d.f_z.jet(p, order);
        let xi = xi_jet(
            &d.psi.jet(p, order - 1),
            &fz.truncate(order - 1),
            &d.f_h.jet(p, order - 1),
        );
        let grad: Vec<Jet> = d_scalar(&fz).iter().map(|g| &xi * g).collect();
        vec![Jet::integrate(value, &grad)]
    }))
}

/// The conformally Kähler condition on `N`, in terms of `β = e^φ σ̃`:
/// `dβ − f_H⁻¹ ω_H ∧ ι_Z β` (a three-form; returned as values).
pub fn kahler_condition(
    data: &RotatingKillingData,
    phi: &ScalarField,
    sigma: &FormField,
    p: &[f64],
) -> Result<Vec<f64>> {
    let n = data.dim();
    data.hk.chart().check(p)?;
    let e = phi.jet(p, 1).exp();
    let s = sigma.eval(p, 1);
    let beta: Vec<Jet> = s.iter().map(|c| &e * c).collect();
    let d_beta = crate::tensorlab::forms::d_jets(&beta, n, 2);
    let beta0: Vec<f64> = truncate_all(&beta, 0).iter().map(Jet::value).collect();
    let iz = interior(&data.z.values(p), &beta0, 2, n);
    let wh = data.omega_h.values(p);
    let rhs = wedge(&wh, 2, &iz, 1, n);
    let fh = data.f_h.value(p);
    Ok(d_beta
        .iter()
        .zip(&rhs)
        .map(|(a, b)| a.value() - b / fh)
        .collect())
}

/// Orthonormal-frame size of a three-form.
pub fn three_form_norm(data: &RotatingKillingData, comps: &[f64], p: &[f64]) -> Result<f64> {
    let frame = data.frame(p)?;
    Ok(form_frame_norm(comps, 3, &frame))
}
