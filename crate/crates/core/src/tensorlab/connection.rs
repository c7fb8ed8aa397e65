//! Levi-Civita connection: Christoffel symbols and covariant derivatives.
//!
//! Index layouts: `Γ^k_{ij}` at `(k*n + i)*n + j`; `(∇V)^i_j = ∇_j V^i` at
//! `i*n + j`; a covariant derivative of a tensor appends the derivative
//! index as the last (fastest) slot.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::jet::linalg::{det_values, inverse};
use crate::jet::Jet;

use super::field::{EndoField, Field, MetricField, VectorField};
use super::frame::{Frame, Slot};

fn degenerate(g: &[f64], n: usize) -> Option<f64> {
    let det = det_values(g, n);
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !det.is_finite() || det.abs() <= 1e-13 * scale.powi(n as i32) {
        Some(det)
    } else {
        None
    }
}

/// Metric values at `p`, rejecting points outside the domain and
/// degenerate metrics.
pub fn metric_at(g: &MetricField, p: &[f64]) -> Result<Vec<f64>> {
    g.chart().check(p)?;
    let v = g.values(p);
    let n = g.dim();
    if let Some(det) = degenerate(&v, n) {
        return Err(GeoError::DegenerateMetric {
            point: p.to_vec(),
            det,
        });
    }
    Ok(v)
}

/// Metric jets to `order` at `p`, with the same checks as [`metric_at`].
pub fn metric_jets(g: &MetricField, p: &[f64], order: usize) -> Result<Vec<Jet>> {
    g.require_order(order)?;
    g.chart().check(p)?;
    let jets = g.eval(p, order);
    let vals: Vec<f64> = jets.iter().map(Jet::value).collect();
    if let Some(det) = degenerate(&vals, g.dim()) {
        return Err(GeoError::DegenerateMetric {
            point: p.to_vec(),
            det,
        });
    }
    Ok(jets)
}

/// Orthonormal frame of `g` at `p`.
pub fn orthonormal_frame(g: &MetricField, p: &[f64]) -> Result<Frame> {
    let v = metric_at(g, p)?;
    Frame::orthonormal(&v, g.dim()).map_err(|e| match e {
        GeoError::DegenerateMetric { det, .. } => GeoError::DegenerateMetric {
            point: p.to_vec(),
            det,
        },
        other => other,
    })
}

pub fn inverse_metric_jets(g: &[Jet], n: usize) -> Option<Vec<Jet>> {
    inverse(g, n)
}

/// Christoffel symbols from metric jets of order `o ≥ 1`; result has order
/// `o − 1`.
pub fn christoffel_jets(g: &[Jet], n: usize) -> Option<Vec<Jet>> {
    let order = g[0].order() - 1;
    let low: Vec<Jet> = g.iter().map(|j| j.truncate(order)).collect();
    let ginv = inverse(&low, n)?;
    // dg[(i*n + j)*n + l] = ∂_l g_ij
    let mut dg = Vec::with_capacity(n * n * n);
    for ij in 0..n * n {
        for l in 0..n {
            dg.push(g[ij].partial(l));
        }
    }
    let zero = low[0].zero_like();
    let mut first = vec![zero.clone(); n * n * n];
    // Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = &(&dg[(j * n + l) * n + i] + &dg[(i * n + l) * n + j])
                    - &dg[(i * n + j) * n + l];
                let v = &v * 0.5;
                first[(l * n + i) * n + j] = v.clone();
                first[(l * n + j) * n + i] = v;
            }
        }
    }
    let mut gamma = vec![zero.clone(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut acc = zero.clone();
                for l in 0..n {
                    acc += &ginv[k * n + l] * &first[(l * n + i) * n + j];
                }
                gamma[(k * n + j) * n + i] = acc.clone();
                gamma[(k * n + i) * n + j] = acc;
            }
        }
    }
    Some(gamma)
}

fn nan_jets(dim: usize, order: usize, len: usize) -> Vec<Jet> {
    vec![Jet::constant(dim, order, f64::NAN); len]
}

/// `Γ^k_{ij}` at `p`.
pub fn christoffel(g: &MetricField, p: &[f64]) -> Result<Vec<f64>> {
    let n = g.dim();
    let jets = metric_jets(g, p, 1)?;
    let gamma = christoffel_jets(&jets, n).ok_or_else(|| GeoError::DegenerateMetric {
        point: p.to_vec(),
        det: 0.0,
    })?;
    Ok(gamma.iter().map(Jet::value).collect())
}

/// Christoffel symbols as a field of `n³` components.
pub fn christoffel_field(g: &MetricField) -> Field {
    let g = g.clone();
    let n = g.dim();
    let max = g.max_order().saturating_sub(1);
    Field::new(Arc::clone(g.chart()), n * n * n, move |p, order| {
        christoffel_jets(&g.eval(p, order + 1), n).unwrap_or_else(|| nan_jets(n, order, n * n * n))
    })
    .with_max_order(max)
}

/// `(∇V)^i_j = ∂_j V^i + Γ^i_{jk} V^k` from jets of `V` (order `o`) and
/// `Γ` (order ≥ `o − 1`).
pub fn nabla_vector_jets(v: &[Jet], gamma: &[Jet], n: usize) -> Vec<Jet> {
    nabla_tensor_jets(v, &[Slot::Up], gamma, n)
}

/// Covariant derivative of a tensor with the given slot pattern; the
/// derivative index is appended last.
pub fn nabla_tensor_jets(t: &[Jet], slots: &[Slot], gamma: &[Jet], n: usize) -> Vec<Jet> {
    let r = slots.len();
    let order = t[0].order() - 1;
    let gamma: Vec<Jet> = gamma.iter().map(|j| j.truncate(order)).collect();
    let low: Vec<Jet> = t.iter().map(|j| j.truncate(order)).collect();
    let len = n.pow(r as u32);
    let mut out = Vec::with_capacity(len * n);
    let mut idx = vec![0usize; r];
    for flat in 0..len {
        let mut rem = flat;
        for s in (0..r).rev() {
            idx[s] = rem % n;
            rem /= n;
        }
        for m in 0..n {
            let mut acc = t[flat].partial(m);
            for (s, slot) in slots.iter().enumerate() {
                let stride = n.pow((r - s - 1) as u32);
                let base = flat - idx[s] * stride;
                let a = idx[s];
                for c in 0..n {
                    let tc = &low[base + c * stride];
                    match slot {
                        Slot::Up => acc += &gamma[(a * n + m) * n + c] * tc,
                        Slot::Down => acc -= &gamma[(c * n + m) * n + a] * tc,
                    }
                }
            }
            out.push(acc);
        }
    }
    out
}

/// `∇V` at `p` as the endomorphism `X ↦ ∇_X V`.
pub fn covariant_derivative_vector(
    g: &MetricField,
    v: &VectorField,
    p: &[f64],
) -> Result<Vec<f64>> {
    let n = g.dim();
    v.require_order(1)?;
    let gj = metric_jets(g, p, 1)?;
    let gamma = christoffel_jets(&gj, n).ok_or_else(|| GeoError::DegenerateMetric {
        point: p.to_vec(),
        det: 0.0,
    })?;
    Ok(nabla_vector_jets(&v.eval(p, 1), &gamma, n)
        .iter()
        .map(Jet::value)
        .collect())
}

/// `∇V` as an endomorphism field.
pub fn nabla_vector_field(g: &MetricField, v: &VectorField) -> EndoField {
    let (g, v) = (g.clone(), v.clone());
    let n = g.dim();
    let max = g.max_order().min(v.max_order()).saturating_sub(1);
    EndoField::new(
        Arc::clone(g.chart()),
        move |p, order| match christoffel_jets(&g.eval(p, order + 1), n) {
            Some(gamma) => nabla_vector_jets(&v.eval(p, order + 1), &gamma, n),
            None => nan_jets(n, order, n * n),
        },
    )
    .with_max_order(max)
}

/// `∇T` at `p` for a tensor field with the given slots.
pub fn covariant_derivative_tensor(
    g: &MetricField,
    t: &Field,
    slots: &[Slot],
    p: &[f64],
) -> Result<Vec<f64>> {
    let n = g.dim();
    assert_eq!(
        t.len(),
        n.pow(slots.len() as u32),
        "slot pattern does not match field"
    );
    t.require_order(1)?;
    let gj = metric_jets(g, p, 1)?;
    let gamma = christoffel_jets(&gj, n).ok_or_else(|| GeoError::DegenerateMetric {
        point: p.to_vec(),
        det: 0.0,
    })?;
    Ok(nabla_tensor_jets(&t.eval(p, 1), slots, &gamma, n)
        .iter()
        .map(Jet::value)
        .collect())
}
