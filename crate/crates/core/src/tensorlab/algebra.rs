//! Pointwise tensor algebra on jet arrays (row-major matrices).

use std::sync::Arc;

use crate::jet::linalg::inverse;
use crate::jet::Jet;

use super::chart::Chart;
use super::field::{EndoField, FormField, MetricField, ScalarField, VectorField};
use super::forms::two_form_matrix;
use super::frame::{max_component, Frame, Slot};

pub fn constants(dim: usize, order: usize, values: &[f64]) -> Vec<Jet> {
    values
        .iter()
        .map(|&v| Jet::constant(dim, order, v))
        .collect()
}

/// `(AV)^i = A^i_j V^j`.
pub fn mat_vec(a: &[Jet], v: &[Jet], n: usize) -> Vec<Jet> {
    (0..n)
        .map(|i| {
            let mut acc = v[0].zero_like().truncate(a[0].order());
            for j in 0..n {
                acc += &a[i * n + j] * &v[j];
            }
            acc
        })
        .collect()
}

/// `g(U, V)`.
pub fn bilinear(g: &[Jet], u: &[Jet], v: &[Jet], n: usize) -> Jet {
    let mut acc = u[0].zero_like().truncate(g[0].order().min(v[0].order()));
    for i in 0..n {
        for j in 0..n {
            acc += &(&g[i * n + j] * &u[i]) * &v[j];
        }
    }
    acc
}

/// The one-form `g(V, −)`.
pub fn lower(g: &[Jet], v: &[Jet], n: usize) -> Vec<Jet> {
    (0..n)
        .map(|j| {
            let mut acc = v[0].zero_like().truncate(g[0].order());
            for i in 0..n {
                acc += &g[i * n + j] * &v[i];
            }
            acc
        })
        .collect()
}

/// The endomorphism `I` with `g(IX, Y) = ω(X, Y)`, i.e. `I = −g⁻¹ω`.
pub fn endo_from_two_form(g: &[Jet], omega: &[Jet], n: usize) -> Option<Vec<Jet>> {
    let ginv = inverse(g, n)?;
    let w = two_form_matrix(omega, n);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = w[0].zero_like().truncate(ginv[0].order());
            for k in 0..n {
                acc -= &ginv[i * n + k] * &w[k * n + j];
            }
            out.push(acc);
        }
    }
    Some(out)
}

pub fn identity(dim: usize, order: usize, n: usize) -> Vec<Jet> {
    (0..n * n)
        .map(|k| Jet::constant(dim, order, if k % (n + 1) == 0 { 1.0 } else { 0.0 }))
        .collect()
}

pub fn truncate_all(v: &[Jet], order: usize) -> Vec<Jet> {
    v.iter().map(|j| j.truncate(order)).collect()
}

/// A metric field with constant components.
pub fn constant_metric(chart: Arc<Chart>, g: Vec<f64>) -> MetricField {
    let n = chart.dim();
    MetricField::new(chart, move |_, order| constants(n, order, &g))
}

pub fn constant_endo(chart: Arc<Chart>, a: Vec<f64>) -> EndoField {
    let n = chart.dim();
    EndoField::new(chart, move |_, order| constants(n, order, &a))
}

/// `I V` as a vector field.
pub fn apply_field(a: &EndoField, v: &VectorField) -> VectorField {
    let (a, v) = (a.clone(), v.clone());
    let n = a.dim();
    let max = a.max_order().min(v.max_order());
    VectorField::new(Arc::clone(a.chart()), move |p, order| {
        mat_vec(&a.eval(p, order), &v.eval(p, order), n)
    })
    .with_max_order(max)
}

/// `g(U, V)` as a scalar field.
pub fn pairing_field(g: &MetricField, u: &VectorField, v: &VectorField) -> ScalarField {
    let (g, u, v) = (g.clone(), u.clone(), v.clone());
    let n = g.dim();
    let max = g.max_order().min(u.max_order()).min(v.max_order());
    ScalarField::new(Arc::clone(g.chart()), move |p, order| {
        vec![bilinear(
            &g.eval(p, order),
            &u.eval(p, order),
            &v.eval(p, order),
            n,
        )]
    })
    .with_max_order(max)
}

/// `g(V, −)` as a one-form field.
pub fn lower_field(g: &MetricField, v: &VectorField) -> FormField {
    let (g, v) = (g.clone(), v.clone());
    let n = g.dim();
    let max = g.max_order().min(v.max_order());
    FormField::new(Arc::clone(g.chart()), 1, move |p, order| {
        lower(&g.eval(p, order), &v.eval(p, order), n)
    })
    .with_max_order(max)
}

/// `−g⁻¹ω` as an endomorphism field (NaN where `g` is singular).
pub fn endo_from_form_field(g: &MetricField, omega: &FormField) -> EndoField {
    let (g, w) = (g.clone(), omega.clone());
    let n = g.dim();
    let max = g.max_order().min(w.max_order());
    EndoField::new(Arc::clone(g.chart()), move |p, order| {
        endo_from_two_form(&g.eval(p, order), &w.eval(p, order), n)
            .unwrap_or_else(|| vec![Jet::constant(n, order, f64::NAN); n * n])
    })
    .with_max_order(max)
}

/// Full antisymmetric array `ω_{i₁…i_p}` (row-major) of a compressed form.
pub fn expand_form(comps: &[f64], degree: usize, n: usize) -> Vec<f64> {
    let len = n.pow(degree as u32);
    let mut out = vec![0.0; len];
    let mut idx = vec![0usize; degree];
    for (flat, slot) in out.iter_mut().enumerate() {
        let mut rem = flat;
        for s in (0..degree).rev() {
            idx[s] = rem % n;
            rem /= n;
        }
        *slot = super::forms::component_value(comps, n, &idx);
    }
    out
}

/// Largest frame component of a compressed p-form.
pub fn form_frame_norm(comps: &[f64], degree: usize, frame: &Frame) -> f64 {
    if comps.is_empty() {
        return 0.0;
    }
    let n = frame.dim();
    let full = expand_form(comps, degree, n);
    max_component(&frame.transform(&full, &vec![Slot::Down; degree]))
}

/// Largest frame component of an endomorphism.
pub fn endo_frame_norm(a: &[f64], frame: &Frame) -> f64 {
    max_component(&frame.transform(a, &[Slot::Up, Slot::Down]))
}

/// Commutator `AB − BA` of value matrices.
pub fn commutator(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += a[i * n + k] * b[k * n + j] - b[i * n + k] * a[k * n + j];
            }
            out[i * n + j] = s;
        }
    }
    out
}

pub fn matmul_values(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// `(Σ_k T^k_i S_kj)`: the bilinear form `S(T·, ·)`.
pub fn compose_form(s: &[f64], t: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| t[k * n + i] * s[k * n + j]).sum();
        }
    }
    out
}

/// Positive and negative eigenvalue counts of a symmetric matrix.
pub fn signature(m: &[f64], n: usize) -> (usize, usize) {
    let eig = nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_row_slice(n, n, m));
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * scale;
    let pos = eig.eigenvalues.iter().filter(|&&v| v > tol).count();
    let neg = eig.eigenvalues.iter().filter(|&&v| v < -tol).count();
    (pos, neg)
}
