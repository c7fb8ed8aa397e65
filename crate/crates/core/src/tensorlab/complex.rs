//! Almost complex structures: Nijenhuis tensor, fundamental form, Lee form.
//!
//! The fundamental form of `(g, J)` is `σ(X,Y) = g(JX, Y)`, i.e.
//! `σ_ij = J^k_i g_kj`.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::jet::linalg::solve;
use crate::jet::Jet;

use super::field::{EndoField, FormField, MetricField};
use super::forms::{
    combo_index, combos, d_jets, exterior_derivative, form_len, two_form_from_matrix,
};

/// Largest tolerated `|J² + Id|` component for an almost complex structure.
pub const ALMOST_COMPLEX_TOL: f64 = 1e-8;

/// Largest component of `J² + Id`.
pub fn almost_complex_residual(j: &[f64], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut s: f64 = (0..n).map(|k| j[a * n + k] * j[k * n + b]).sum();
            if a == b {
                s += 1.0;
            }
            worst = worst.max(s.abs());
        }
    }
    worst
}

/// `N^i_{jk}` at `(i*n + j)*n + k` from jets of `J` of order `o ≥ 1`.
pub fn nijenhuis_jets(j: &[Jet], n: usize) -> Vec<Jet> {
    let o = j[0].order() - 1;
    let jl: Vec<Jet> = j.iter().map(|x| x.truncate(o)).collect();
    // dj[(a*n + b)*n + m] = ∂_m J^a_b
    let dj: Vec<Jet> = (0..n * n * n).map(|k| j[k / n].partial(k % n)).collect();
    let d = |a: usize, b: usize, m: usize| &dj[(a * n + b) * n + m];
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut acc = jl[0].zero_like();
                for m in 0..n {
                    acc += &jl[m * n + a] * d(i, b, m);
                    acc -= &jl[m * n + b] * d(i, a, m);
                    acc += &jl[i * n + m] * d(m, a, b);
                    acc -= &jl[i * n + m] * d(m, b, a);
                }
                out.push(acc);
            }
        }
    }
    out
}

fn check_almost_complex(j: &EndoField, p: &[f64]) -> Result<()> {
    let residual = almost_complex_residual(&j.values(p), j.dim());
    if residual > ALMOST_COMPLEX_TOL {
        return Err(GeoError::AlmostComplex { residual });
    }
    Ok(())
}

/// `N(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]` on coordinate fields.
pub fn nijenhuis(j: &EndoField, p: &[f64]) -> Result<Vec<f64>> {
    j.chart().check(p)?;
    j.require_order(1)?;
    check_almost_complex(j, p)?;
    Ok(nijenhuis_jets(&j.eval(p, 1), j.dim())
        .iter()
        .map(Jet::value)
        .collect())
}

/// `σ_ij = J^k_i g_kj` as compressed 2-form jets.
pub fn fundamental_form_jets(g: &[Jet], j: &[Jet], n: usize) -> Vec<Jet> {
    let mut m = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut acc = g[0].zero_like();
            for k in 0..n {
                acc += &j[k * n + a] * &g[k * n + b];
            }
            m.push(acc);
        }
    }
    two_form_from_matrix(&m, n)
}

pub fn fundamental_form(g: &MetricField, j: &EndoField, p: &[f64]) -> Result<Vec<f64>> {
    g.chart().check(p)?;
    Ok(fundamental_form_jets(&g.eval(p, 0), &j.eval(p, 0), g.dim())
        .iter()
        .map(Jet::value)
        .collect())
}

pub fn fundamental_form_field(g: &MetricField, j: &EndoField) -> FormField {
    let (g, j) = (g.clone(), j.clone());
    let n = g.dim();
    let max = g.max_order().min(j.max_order());
    FormField::new(Arc::clone(g.chart()), 2, move |p, order| {
        fundamental_form_jets(&g.eval(p, order), &j.eval(p, order), n)
    })
    .with_max_order(max)
}

/// Solves `θ∧σ = dσ` in dimension 4 from σ jets of order `o ≥ 1`; the
/// result has order `o − 1`.
pub fn lee_form_jets(sigma: &[Jet]) -> Option<Vec<Jet>> {
    let n = 4;
    let ds = d_jets(sigma, n, 2);
    let o = ds[0].order();
    let s: Vec<Jet> = sigma.iter().map(|x| x.truncate(o)).collect();
    let sig = |a: usize, b: usize| &s[combo_index(n, &[a, b])];
    let zero = ds[0].zero_like();
    let mut m = vec![zero; form_len(n, 3) * n];
    // (θ∧σ)_{ijk} = θ_i σ_jk − θ_j σ_ik + θ_k σ_ij
    for (r, c) in combos(n, 3).iter().enumerate() {
        let (i, j, k) = (c[0], c[1], c[2]);
        m[r * n + i] = sig(j, k).clone();
        m[r * n + j] = -sig(i, k);
        m[r * n + k] = sig(i, j).clone();
    }
    solve(&m, &ds, n, 1)
}

fn require_dim4(dim: usize) -> Result<()> {
    if dim != 4 {
        return Err(GeoError::UnsupportedDimension {
            expected: 4,
            got: dim,
        });
    }
    Ok(())
}

/// The Lee form θ of `(g, J)`: `dσ = θ∧σ`.
pub fn lee_form(g: &MetricField, j: &EndoField, p: &[f64]) -> Result<Vec<f64>> {
    require_dim4(g.dim())?;
    g.chart().check(p)?;
    let sigma = fundamental_form_field(g, j);
    sigma.require_order(1)?;
    let theta = lee_form_jets(&sigma.eval(p, 1)).ok_or_else(|| {
        GeoError::DegenerateForm(format!("fundamental form is degenerate at {p:?}"))
    })?;
    Ok(theta.iter().map(Jet::value).collect())
}

/// The Lee form as a one-form field (NaN where σ degenerates).
pub fn lee_form_field(g: &MetricField, j: &EndoField) -> Result<FormField> {
    require_dim4(g.dim())?;
    let sigma = fundamental_form_field(g, j);
    let max = sigma.max_order().saturating_sub(1);
    Ok(FormField::new(Arc::clone(g.chart()), 1, move |p, order| {
        lee_form_jets(&sigma.eval(p, order + 1))
            .unwrap_or_else(|| vec![Jet::constant(4, order, f64::NAN); 4])
    })
    .with_max_order(max))
}

/// `dθ` at `p`.
pub fn d_lee_form(g: &MetricField, j: &EndoField, p: &[f64]) -> Result<Vec<f64>> {
    lee_form(g, j, p)?;
    let theta = lee_form_field(g, j)?;
    theta.require_order(1)?;
    exterior_derivative(&theta, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorlab::chart::Chart;

    fn flat4() -> (MetricField, EndoField) {
        let chart = Arc::new(Chart::euclidean(
            &["a", "b", "c", "d"],
            vec![(-1.0, 1.0); 4],
        ));
        let g = MetricField::from_jets(Arc::clone(&chart), |x| {
            (0..16)
                .map(|k| x[0].lift(if k % 5 == 0 { 1.0 } else { 0.0 }))
                .collect()
        });
        // J ∂a = ∂b, J ∂c = ∂d
        let j = EndoField::from_jets(chart, |x| {
            let mut m = vec![x[0].zero_like(); 16];
            m[4] = x[0].lift(1.0);
            m[1] = x[0].lift(-1.0);
            m[3 * 4 + 2] = x[0].lift(1.0);
            m[2 * 4 + 3] = x[0].lift(-1.0);
            m
        });
        (g, j)
    }

    #[test]
    fn flat_kahler_has_no_torsion_and_zero_lee_form() {
        let (g, j) = flat4();
        let p = [0.1, 0.2, 0.3, 0.4];
        assert!(nijenhuis(&j, &p).unwrap().iter().all(|v| *v == 0.0));
        assert!(lee_form(&g, &j, &p).unwrap().iter().all(|v| *v == 0.0));
        // σ(∂a, ∂b) = g(J∂a, ∂b) = 1
        assert_eq!(fundamental_form(&g, &j, &p).unwrap()[0], 1.0);
    }

    #[test]
    fn conformal_rescaling_gives_exact_lee_form() {
        // (e^{2f} g, J) with f = a² + bd: σ' = e^{2f}σ, θ = 2 df
        let (g0, j) = flat4();
        let g = MetricField::from_jets(Arc::clone(g0.chart()), |x| {
            let w = (&(&x[0].square() + &(&x[1] * &x[3])) * 2.0).exp();
            (0..16)
                .map(|k| if k % 5 == 0 { w.clone() } else { w.zero_like() })
                .collect()
        });
        let p = [0.3, -0.2, 0.5, 0.7];
        let theta = lee_form(&g, &j, &p).unwrap();
        let expect = [2.0 * 2.0 * p[0], 2.0 * p[3], 0.0, 2.0 * p[1]];
        for k in 0..4 {
            assert!((theta[k] - expect[k]).abs() < 1e-12, "{theta:?}");
        }
        assert!(d_lee_form(&g, &j, &p)
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn non_complex_endomorphism_is_rejected() {
        let chart = Arc::new(Chart::euclidean(&["x", "y"], vec![(-1.0, 1.0); 2]));
        let j = EndoField::from_jets(chart, |x| {
            vec![
                x[0].lift(1.0),
                x[0].zero_like(),
                x[0].zero_like(),
                x[0].lift(1.0),
            ]
        });
        assert!(matches!(
            nijenhuis(&j, &[0.0, 0.0]),
            Err(GeoError::AlmostComplex { .. })
        ));
    }

    #[test]
    fn lee_form_needs_dimension_four() {
        let chart = Arc::new(Chart::euclidean(&["x", "y"], vec![(-1.0, 1.0); 2]));
        let g = MetricField::from_jets(Arc::clone(&chart), |x| {
            vec![
                x[0].lift(1.0),
                x[0].zero_like(),
                x[0].zero_like(),
                x[0].lift(1.0),
            ]
        });
        let j = EndoField::from_jets(chart, |x| {
            vec![
                x[0].zero_like(),
                x[0].lift(-1.0),
                x[0].lift(1.0),
                x[0].zero_like(),
            ]
        });
        assert!(matches!(
            lee_form(&g, &j, &[0.0, 0.0]),
            Err(GeoError::UnsupportedDimension {
                expected: 4,
                got: 2
            })
        ));
    }
}
