use std::sync::Arc;

use qkgeo::jet::Jet;
use qkgeo::qkside::{gabc_metric, GabcParams};
use qkgeo::tensorlab::complex::{lee_form, nijenhuis};
use qkgeo::tensorlab::connection::{christoffel, covariant_derivative_vector, metric_at};
use qkgeo::tensorlab::curvature::{
    bianchi_residual, curvature_norm, nabla_riemann, riemann, scalar_curvature,
};
use qkgeo::tensorlab::forms::{exterior_derivative, exterior_derivative_field};
use qkgeo::tensorlab::lie::{lie_bracket, lie_derivative_metric};
use qkgeo::tensorlab::field::coordinate_vector;
use qkgeo::tensorlab::{Chart, EndoField, FormField, MetricField};

fn plane(lo: f64) -> Arc<Chart> {
    Arc::new(Chart::new("plane", &["x", "y"], vec![(-1.0, 1.0), (lo, 2.0)], |p, m| {
        p[1] > m
    }))
}

fn r4() -> Arc<Chart> {
    Arc::new(Chart::euclidean(&["a", "b", "c", "d"], vec![(-1.0, 1.0); 4]))
}

fn hyperbolic_plane() -> MetricField {
    MetricField::from_jets(plane(0.5), |c| {
        let w = c[1].square().recip();
        let z = w.zero_like();
        vec![w.clone(), z.clone(), z, w]
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn euclidean_christoffels_vanish() {
    let g = MetricField::from_jets(plane(0.5), |c| {
        let one = c[0].lift(1.0);
        let z = c[0].zero_like();
        vec![one.clone(), z.clone(), z, one]
    });
    assert_eq!(max_abs(&christoffel(&g, &[0.3, 1.2]).unwrap()), 0.0);
}

#[test]
fn hyperbolic_plane_christoffels() {
    let gamma = christoffel(&hyperbolic_plane(), &[0.0, 1.0]).unwrap();
    let at = |k: usize, i: usize, j: usize| gamma[(k * 2 + i) * 2 + j];
    let (x, y) = (0, 1);
    assert!((at(x, x, y) + 1.0).abs() < 1e-14);
    assert!((at(x, y, x) + 1.0).abs() < 1e-14);
    assert!((at(y, x, x) - 1.0).abs() < 1e-14);
    assert!((at(y, y, y) + 1.0).abs() < 1e-14);
    assert!(at(x, x, x).abs() < 1e-14 && at(y, x, y).abs() < 1e-14);
    // constant curvature −1
    let s = scalar_curvature(&hyperbolic_plane(), &[0.4, 1.3]).unwrap();
    assert!((s + 2.0).abs() < 1e-12, "{s}");
}

/// Central differences of the metric values, then the Koszul formula.
fn christoffel_fd(g: &MetricField, p: &[f64], h: f64) -> Vec<f64> {
    let n = p.len();
    let gv = metric_at(g, p).unwrap();
    let dg: Vec<Vec<f64>> = (0..n)
        .map(|l| {
            let (mut a, mut b) = (p.to_vec(), p.to_vec());
            a[l] += h;
            b[l] -= h;
            let (ga, gb) = (g.values(&a), g.values(&b));
            ga.iter().zip(&gb).map(|(u, v)| (u - v) / (2.0 * h)).collect()
        })
        .collect();
    let inv = nalgebra::DMatrix::from_row_slice(n, n, &gv).try_inverse().unwrap();
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[(k * n + i) * n + j] = (0..n)
                    .map(|l| {
                        0.5 * inv[(k, l)]
                            * (dg[i][l * n + j] + dg[j][l * n + i] - dg[l][i * n + j])
                    })
                    .sum();
            }
        }
    }
    out
}

#[test]
fn christoffels_match_finite_differences() {
    let params = GabcParams::new(0.0, 0.0, 1.0, -1.0).unwrap();
    let g = gabc_metric(&params);
    let p = [0.8, 0.1, -0.2, 0.3];
    let exact = christoffel(&g, &p).unwrap();
    let fd = christoffel_fd(&g, &p, 1e-5);
    let err = exact.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-6, "{err}");
}

#[test]
fn flat_curvature_and_missing_order() {
    let g = MetricField::from_jets(r4(), |c| {
        let mut v = vec![c[0].zero_like(); 16];
        for i in 0..4 {
            v[i * 5] = c[0].lift(1.0 + i as f64);
        }
        v
    });
    let p = [0.1, 0.2, 0.3, 0.4];
    assert_eq!(max_abs(&riemann(&g, &p).unwrap()), 0.0);
    assert_eq!(curvature_norm(&g, &p).unwrap(), 0.0);
    let g1 = g.with_max_order(1);
    assert!(riemann(&g1, &p).is_err());
}

#[test]
fn curvature_norm_of_the_family() {
    let b0 = gabc_metric(&GabcParams::new(-1.0, 0.0, 2.0, -1.0).unwrap());
    let v = curvature_norm(&b0, &[1.0, 0.2, -0.1, 0.5]).unwrap();
    assert!((v - 24.0).abs() < 1e-9, "{v}");
    let g = gabc_metric(&GabcParams::new(0.0, 1.0, 1.0, -1.0).unwrap());
    let v = curvature_norm(&g, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!((v - 24.0 * (1.0 + 1.0 / 729.0)).abs() < 1e-9, "{v}");
}

#[test]
fn riemann_symmetries_on_the_family() {
    let g = gabc_metric(&GabcParams::new(1.0, -1.0, 1.0, -1.0).unwrap());
    let p = [0.7, 0.3, -0.4, 0.1];
    let r = riemann(&g, &p).unwrap();
    let n = 4;
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    let scale = max_abs(&r);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert!((r[idx(l, k, i, j)] + r[idx(l, k, j, i)]).abs() < 1e-12 * scale);
                }
            }
        }
    }
    assert!(bianchi_residual(&r, n) < 1e-10 * scale);
}

#[test]
fn time_translation_is_killing() {
    let params = GabcParams::new(1.0, 1.0, 1.0, -1.0).unwrap();
    let g = gabc_metric(&params);
    let dt = coordinate_vector(params.chart(), 3);
    for p in [[0.6, 0.1, 0.2, 0.3], [1.4, -0.5, 0.4, -0.2]] {
        assert!(max_abs(&lie_derivative_metric(&g, &dt, &p).unwrap()) < 1e-12);
        let nv = covariant_derivative_vector(&g, &dt, &p).unwrap();
        let gv = metric_at(&g, &p).unwrap();
        // g(∇_X V, Y) = Σ g_{kj} (∇V)^k_i, antisymmetric in (i, j)
        let low = |i: usize, j: usize| (0..4).map(|k| gv[k * 4 + j] * nv[k * 4 + i]).sum::<f64>();
        for i in 0..4 {
            for j in 0..4 {
                assert!((low(i, j) + low(j, i)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn nabla_riemann_separates_symmetric_members() {
    let hyp = gabc_metric(&GabcParams::new(0.0, 0.0, 1.0, -1.0).unwrap());
    let p = [0.9, 0.2, 0.1, -0.3];
    assert!(max_abs(&nabla_riemann(&hyp, &p).unwrap()) < 1e-8);
    let g = gabc_metric(&GabcParams::new(0.0, 1.0, 1.0, -1.0).unwrap());
    assert!(max_abs(&nabla_riemann(&g, &[0.8, 0.0, 0.0, 0.0]).unwrap()) > 1e-3);
}

#[test]
fn coordinate_brackets_vanish() {
    let c = r4();
    let (x, y) = (coordinate_vector(c.clone(), 1), coordinate_vector(c, 2));
    assert_eq!(max_abs(&lie_bracket(&x, &y, &[0.1, 0.2, 0.3, 0.4]).unwrap()), 0.0);
}

#[test]
fn exterior_derivative_basics() {
    let c = r4();
    // x dy on coordinates (a, b, c, d) read as x = b, y = c
    let xdy = FormField::from_jets(c.clone(), 1, |q| {
        let z = q[0].zero_like();
        vec![z.clone(), z.clone(), q[1].clone(), z]
    });
    let d = exterior_derivative(&xdy, &[0.3, -0.2, 0.5, 0.1]).unwrap();
    // 2-form order: 01 02 03 12 13 23
    assert_eq!(d, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    let theta = FormField::from_jets(c, 1, |q| {
        vec![
            (&q[1] * &q[2]).sin(),
            q[0].square() * q[3].exp(),
            (&q[0] * &q[1]).cos(),
            &q[2] * &q[3].square(),
        ]
    });
    let dd = exterior_derivative_field(&exterior_derivative_field(&theta));
    assert!(max_abs(&dd.values(&[0.2, 0.4, -0.3, 0.7])) < 1e-13);
}

fn standard_j(c: Arc<Chart>) -> EndoField {
    EndoField::from_jets(c, |q| {
        let z = q[0].zero_like();
        let mut m = vec![z; 16];
        m[1] = q[0].lift(-1.0);
        m[4] = q[0].lift(1.0);
        m[11] = q[0].lift(-1.0);
        m[14] = q[0].lift(1.0);
        m
    })
}

#[test]
fn constant_structures_are_integrable_and_flat_lee_form_vanishes() {
    let c = r4();
    let j = standard_j(c.clone());
    let p = [0.1, -0.3, 0.2, 0.5];
    assert_eq!(max_abs(&nijenhuis(&j, &p).unwrap()), 0.0);
    let g = MetricField::from_jets(c, |q| {
        let mut v = vec![q[0].zero_like(); 16];
        for i in 0..4 {
            v[i * 5] = q[0].lift(1.0);
        }
        v
    });
    assert!(max_abs(&lee_form(&g, &j, &p).unwrap()) < 1e-14);
}

#[test]
fn jets_match_finite_differences() {
    let f = |x: f64, y: f64| (x * y).sin() * (x - y).exp();
    let p = [0.4, -0.7];
    let s = Jet::seed(&p, 2);
    let j = &(&s[0] * &s[1]).sin() * &(&s[0] - &s[1]).exp();
    let h = 1e-5;
    let fx = (f(p[0] + h, p[1]) - f(p[0] - h, p[1])) / (2.0 * h);
    let fxy = (f(p[0] + h, p[1] + h) - f(p[0] + h, p[1] - h) - f(p[0] - h, p[1] + h)
        + f(p[0] - h, p[1] - h))
        / (4.0 * h * h);
    assert!((j.derivative(&[0]) - fx).abs() < 1e-8);
    assert!((j.derivative(&[0, 1]) - fxy).abs() < 1e-5);
}
