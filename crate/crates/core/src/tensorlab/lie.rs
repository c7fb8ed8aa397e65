//! Lie brackets and Lie derivatives.

use std::sync::Arc;

use crate::error::Result;
use crate::jet::Jet;

use super::field::{EndoField, MetricField, VectorField};

fn low(v: &[Jet]) -> Vec<Jet> {
    let o = v[0].order() - 1;
    v.iter().map(|j| j.truncate(o)).collect()
}

/// `[V,W]^i = V^j ∂_j W^i − W^j ∂_j V^i`; order drops by one.
pub fn bracket_jets(v: &[Jet], w: &[Jet], n: usize) -> Vec<Jet> {
    let (vl, wl) = (low(v), low(w));
    (0..n)
        .map(|i| {
            let mut acc = vl[0].zero_like();
            for j in 0..n {
                acc += &vl[j] * &w[i].partial(j);
                acc -= &wl[j] * &v[i].partial(j);
            }
            acc
        })
        .collect()
}

/// `(L_V g)_{ij} = V^k ∂_k g_ij + g_kj ∂_i V^k + g_ik ∂_j V^k`.
pub fn lie_metric_jets(g: &[Jet], v: &[Jet], n: usize) -> Vec<Jet> {
    let (gl, vl) = (low(g), low(v));
    let dv: Vec<Jet> = (0..n * n).map(|ki| v[ki / n].partial(ki % n)).collect();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = gl[0].zero_like();
            for k in 0..n {
                acc += &vl[k] * &g[i * n + j].partial(k);
                acc += &gl[k * n + j] * &dv[k * n + i];
                acc += &gl[i * n + k] * &dv[k * n + j];
            }
            out.push(acc);
        }
    }
    out
}

/// `(L_V J)^i_j = V^k ∂_k J^i_j − J^k_j ∂_k V^i + J^i_k ∂_j V^k`.
pub fn lie_endo_jets(a: &[Jet], v: &[Jet], n: usize) -> Vec<Jet> {
    let (al, vl) = (low(a), low(v));
    let dv: Vec<Jet> = (0..n * n).map(|ki| v[ki / n].partial(ki % n)).collect();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = al[0].zero_like();
            for k in 0..n {
                acc += &vl[k] * &a[i * n + j].partial(k);
                acc -= &al[k * n + j] * &dv[i * n + k];
                acc += &al[i * n + k] * &dv[k * n + j];
            }
            out.push(acc);
        }
    }
    out
}

fn values(j: Vec<Jet>) -> Vec<f64> {
    j.iter().map(Jet::value).collect()
}

pub fn lie_bracket(v: &VectorField, w: &VectorField, p: &[f64]) -> Result<Vec<f64>> {
    v.chart().check(p)?;
    v.require_order(1)?;
    w.require_order(1)?;
    Ok(values(bracket_jets(&v.eval(p, 1), &w.eval(p, 1), v.dim())))
}

pub fn lie_derivative_metric(g: &MetricField, v: &VectorField, p: &[f64]) -> Result<Vec<f64>> {
    g.chart().check(p)?;
    g.require_order(1)?;
    v.require_order(1)?;
    Ok(values(lie_metric_jets(
        &g.eval(p, 1),
        &v.eval(p, 1),
        g.dim(),
    )))
}

pub fn lie_derivative_endo(a: &EndoField, v: &VectorField, p: &[f64]) -> Result<Vec<f64>> {
    a.chart().check(p)?;
    a.require_order(1)?;
    v.require_order(1)?;
    Ok(values(lie_endo_jets(&a.eval(p, 1), &v.eval(p, 1), a.dim())))
}

/// `[V,W]` as a vector field.
pub fn bracket_field(v: &VectorField, w: &VectorField) -> VectorField {
    let (v, w) = (v.clone(), w.clone());
    let n = v.dim();
    let max = v.max_order().min(w.max_order()).saturating_sub(1);
    VectorField::new(Arc::clone(v.chart()), move |p, order| {
        bracket_jets(&v.eval(p, order + 1), &w.eval(p, order + 1), n)
    })
    .with_max_order(max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorlab::chart::Chart;
    use crate::tensorlab::field::coordinate_vector;

    #[test]
    fn coordinate_fields_commute() {
        let chart = Arc::new(Chart::euclidean(&["x", "y"], vec![(-1.0, 1.0); 2]));
        let dx = coordinate_vector(Arc::clone(&chart), 0);
        let dy = coordinate_vector(chart, 1);
        assert_eq!(lie_bracket(&dx, &dy, &[0.2, 0.3]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn rotation_is_killing_for_euclidean_plane() {
        let chart = Arc::new(Chart::euclidean(&["x", "y"], vec![(-1.0, 1.0); 2]));
        let rot = VectorField::from_jets(Arc::clone(&chart), |x| vec![-&x[1], x[0].clone()]);
        let g = MetricField::from_jets(Arc::clone(&chart), |x| {
            vec![
                x[0].lift(1.0),
                x[0].zero_like(),
                x[0].zero_like(),
                x[0].lift(1.0),
            ]
        });
        let l = lie_derivative_metric(&g, &rot, &[0.4, -0.1]).unwrap();
        assert!(l.iter().all(|v| v.abs() < 1e-15));
        // the standard complex structure is rotation invariant
        let j = EndoField::from_jets(chart, |x| {
            vec![
                x[0].zero_like(),
                x[0].lift(-1.0),
                x[0].lift(1.0),
                x[0].zero_like(),
            ]
        });
        let lj = lie_derivative_endo(&j, &rot, &[0.4, -0.1]).unwrap();
        assert!(lj.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn bracket_of_polynomial_fields() {
        // [x ∂y, y ∂x] = x ∂x − y ∂y
        let chart = Arc::new(Chart::euclidean(&["x", "y"], vec![(-1.0, 1.0); 2]));
        let v =
            VectorField::from_jets(Arc::clone(&chart), |x| vec![x[0].zero_like(), x[0].clone()]);
        let w = VectorField::from_jets(chart, |x| vec![x[1].clone(), x[0].zero_like()]);
        let b = lie_bracket(&v, &w, &[0.5, 2.0]).unwrap();
        assert_eq!(b, vec![0.5, -2.0]);
    }
}
