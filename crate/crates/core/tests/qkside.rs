use qkgeo::hkside::TodaSolution;
use qkgeo::jet::Jet;
use qkgeo::qkside::hermitian::orientation_signs;
use qkgeo::qkside::killing::classify_params;
use qkgeo::qkside::pt::pt_from_params;
use qkgeo::qkside::{
    case_transform, curvature_norm_formula, gabc_metric, hermitian_pair, liouville_residual,
    pt_metric, singularity_distance, AlgebraLabel, GabcParams,
};
use qkgeo::sampling::sample_points;
use qkgeo::tensorlab::complex::{d_lee_form, nijenhuis};
use qkgeo::tensorlab::connection::metric_at;
use qkgeo::tensorlab::curvature::{curvature_norm, ricci, riemann, scalar_curvature};
use qkgeo::tensorlab::{Frame, MetricField, ScalarField, Slot};
use qkgeo::verify::target::case_representative;

fn params(a: f64, b: f64, c: f64, k: f64) -> GabcParams {
    GabcParams::new(a, b, c, k).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `Ric − (s/4) g` in an orthonormal frame.
fn einstein_residual(g: &MetricField, p: &[f64]) -> f64 {
    let gv = metric_at(g, p).unwrap();
    let s = scalar_curvature(g, p).unwrap();
    let ric = ricci(g, p).unwrap();
    let r: Vec<f64> = ric.iter().zip(&gv).map(|(a, b)| a - 0.25 * s * b).collect();
    let frame = Frame::orthonormal(&gv, 4).unwrap();
    max_abs(&frame.transform(&r, &[Slot::Down, Slot::Down]))
}

#[test]
fn hyperbolic_member_has_constant_curvature() {
    let pr = params(0.0, 0.0, 1.0, -1.0);
    let g = gabc_metric(&pr);
    // sectional curvature s/12 = ν = 2/K
    let kappa = pr.nu();
    for p in sample_points(&pr.chart(), 5, 1) {
        let gv = metric_at(&g, &p).unwrap();
        let r = riemann(&g, &p).unwrap();
        let n = 4;
        let mut worst = 0.0f64;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let model = kappa * (gv[j * n + k] * d(l, i) - gv[i * n + k] * d(l, j));
                        worst = worst.max((r[((l * n + k) * n + i) * n + j] - model).abs());
                    }
                }
            }
        }
        assert!(worst < 1e-8 * max_abs(&r).max(1.0), "{worst}");
    }
}

#[test]
fn family_members_are_einstein_with_scalar_twelve_nu() {
    for (a, b, c) in [(0.0, 1.0, 1.0), (1.0, 1.0, 1.0), (-1.0, 0.0, 2.0), (1.0, -1.0, 1.0)] {
        let pr = params(a, b, c, -1.0);
        let g = gabc_metric(&pr);
        for p in sample_points(&pr.chart(), 5, 2) {
            assert!(einstein_residual(&g, &p) < 1e-8);
            let s = scalar_curvature(&g, &p).unwrap();
            assert!((s - 12.0 * pr.nu()).abs() < 1e-8 * s.abs());
        }
    }
}

#[test]
fn pt_chart_agrees_with_closed_form_through_invariants() {
    let pr = params(1.0, 1.0, 1.0, -1.0);
    let pt = pt_metric(&pr.toda().unwrap()).unwrap();
    let g = gabc_metric(&pr);
    for p in sample_points(&pr.chart(), 5, 3) {
        let (a, b) = (
            curvature_norm(&pt.metric, &p).unwrap(),
            curvature_norm(&g, &p).unwrap(),
        );
        assert!((a - b).abs() < 1e-7 * b.abs());
        let (a, b) = (
            scalar_curvature(&pt.metric, &p).unwrap(),
            scalar_curvature(&g, &p).unwrap(),
        );
        assert!((a - b).abs() < 1e-7 * b.abs());
    }
}

#[test]
fn gauge_shifted_solution_is_einstein() {
    let (b, c, k) = (1.0, 1.0, -1.0);
    let chart = params(0.0, b, c, k).chart();
    let sol = TodaSolution::from_formula(chart.clone(), k, move |r: &Jet, x: &Jet, _y: &Jet| {
        &(&(r * b) + c).ln() + x
    })
    .unwrap();
    let pt = pt_metric(&sol).unwrap();
    for p in sample_points(&chart, 5, 4) {
        assert!(einstein_residual(&pt.metric, &p) < 1e-7);
    }
}

#[test]
fn constant_solution_gives_constant_p() {
    let pr = params(0.0, 0.0, 3.0, -1.5);
    let pt = pt_from_params(&pr).unwrap();
    for p in sample_points(&pr.chart(), 5, 5) {
        assert!((pt.p.value(&p) - 3.0).abs() < 1e-14);
    }
}

#[test]
fn liouville_examples() {
    let pr = params(1.0, 1.0, 1.0, -1.0);
    let chart = pr.chart();
    let p = [0.7, 0.3, -0.4, 0.2];
    assert!(liouville_residual(&pr.liouville_g(), pr.a, &p).unwrap().abs() < 1e-10);
    let zero = ScalarField::from_jets(chart.clone(), |c| vec![c[0].zero_like()]);
    assert_eq!(liouville_residual(&zero, 0.0, &p).unwrap(), 0.0);
    let gx = ScalarField::from_jets(chart, |c| vec![c[1].clone()]);
    let r = liouville_residual(&gx, 1.0, &p).unwrap();
    assert!((r - p[1].exp()).abs() < 1e-14);
}

#[test]
fn hermitian_pair_properties() {
    let pr = params(0.0, 1.0, 1.0, -1.0);
    let pt = pt_from_params(&pr).unwrap();
    let pair = hermitian_pair(&pt);
    for p in sample_points(&pr.chart(), 5, 6) {
        let scale = max_abs(&pair.j1_tilde.values(&p)).max(1.0);
        assert!(max_abs(&nijenhuis(&pair.j1_tilde, &p).unwrap()) < 1e-8 * scale);
        // g(J̃·, J̃·) = g
        let g = metric_at(&pt.metric, &p).unwrap();
        let j = pair.j1_tilde.values(&p);
        for a in 0..4 {
            for b in 0..4 {
                let v: f64 = (0..4)
                    .flat_map(|k| (0..4).map(move |l| (k, l)))
                    .map(|(k, l)| j[k * 4 + a] * g[k * 4 + l] * j[l * 4 + b])
                    .sum();
                assert!((v - g[a * 4 + b]).abs() < 1e-12 * max_abs(&g));
            }
        }
        let (s1, s2) = orientation_signs(&pt, &pair, &p).unwrap();
        assert!(s1 * s2 < 0.0);
        assert!(max_abs(&d_lee_form(&pt.metric, &pair.j1_tilde, &p).unwrap()) < 1e-8);
    }
}

#[test]
fn killing_catalog_classification() {
    for (a, label) in [
        (0.0, AlgebraLabel::O2Heis3),
        (1.0, AlgebraLabel::U2),
        (-1.0, AlgebraLabel::U11),
    ] {
        let pr = GabcParams::with_sign_rule(a, 1.0, 1.0).unwrap();
        let pts = sample_points(&pr.chart(), 8, 7);
        let (killing, closure, got) = classify_params(&pr, &pts).unwrap();
        assert!(killing < 1e-8, "a = {a}: {killing}");
        assert!(closure < 1e-8, "a = {a}: {closure}");
        assert_eq!(got, label);
        assert_eq!(AlgebraLabel::expected(a), label);
    }
}

#[test]
fn pedersen_identification() {
    let pr = params(1.0, 1.0, 1.0, -1.0);
    let ct = case_transform(3, &pr).unwrap();
    assert!((ct.k_pedersen.unwrap() - 3.0).abs() < 1e-14);
    for p in sample_points(&ct.source_chart(), 10, 8) {
        assert!(ct.residual_at(&p).unwrap() < 1e-8);
    }
    assert!(case_transform(3, &params(-1.0, 1.0, 1.0, -1.0)).is_err());
}

#[test]
fn case_maps_invert() {
    let candidates = [
        params(0.0, 0.0, 1.0, -1.0),
        params(0.0, 1.0, 1.0, -1.0),
        params(1.0, 1.0, 1.0, -1.0),
        params(1.0, 1.0, 0.0, -1.0),
        params(-1.0, 1.0, 1.0, -1.0),
        params(1.0, -1.0, 1.0, -1.0),
        params(-1.0, 0.0, 2.0, -1.0),
    ];
    let mut covered = 0;
    for item in 1..=10u8 {
        for pr in &candidates {
            let Ok(ct) = case_transform(item, pr) else { continue };
            covered += 1;
            for p in sample_points(&ct.source_chart(), 3, 9) {
                let q = ct.inverse(&p);
                let back: Vec<f64> = ct.forward(&Jet::seed(&q, 0)).iter().map(Jet::value).collect();
                for (a, b) in back.iter().zip(&p) {
                    assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "item {item}");
                }
            }
        }
    }
    assert!(covered >= 5);
}

#[test]
fn fubini_study_item() {
    let pr = case_representative(6).unwrap();
    let ct = case_transform(6, &pr).unwrap();
    assert!((ct.k_pedersen.unwrap() + 1.0).abs() < 1e-14);
    let g = gabc_metric(&pr);
    for p in sample_points(&ct.source_chart(), 5, 10) {
        assert!(einstein_residual(&g, &p) < 1e-8);
        assert!(scalar_curvature(&g, &p).unwrap() > 0.0);
    }
}

#[test]
fn singularity_distance_examples() {
    // ρ* = 1/4 sits where aρ² + bρ + c < 0, so nothing bounds the chart
    let eighth = GabcParams::with_sign_rule(1.0, -1.0, 0.125).unwrap();
    assert!(singularity_distance(&eighth, 0.1).is_err());
    let pr = params(1.0, -1.0, 1.0, -1.0);
    let rho0 = 0.2;
    let d = singularity_distance(&pr, rho0).unwrap().value;
    assert!(d.is_finite() && d > 0.0, "{d}");
    let doubled = params(pr.a, pr.b, pr.c, 2.0 * pr.k);
    let d2 = singularity_distance(&doubled, rho0).unwrap().value;
    assert!((d2 / d - 2f64.sqrt()).abs() < 1e-10);
    let none = params(-1.0, 0.0, 2.0, -1.0);
    assert!(singularity_distance(&none, 0.5).is_err());
}

#[test]
fn curvature_norm_formula_examples() {
    let v = curvature_norm_formula(&params(0.0, 1.0, 1.0, -1.0), 1.0).unwrap();
    assert!((v - 24.0 * 730.0 / 729.0).abs() < 1e-12);
    for pr in [params(-1.0, 0.0, 2.0, -1.0), params(1.0, 2.0, 1.0, -1.0)] {
        let v0 = curvature_norm_formula(&pr, 0.3).unwrap();
        for rho in [0.1, 0.5, 0.9] {
            assert_eq!(curvature_norm_formula(&pr, rho).unwrap(), v0);
        }
        assert!((v0 - 6.0 * pr.nu() * pr.nu()).abs() < 1e-12);
    }
    let pr = params(1.0, -1.0, 1.0, -1.0);
    let g = gabc_metric(&pr);
    for p in sample_points(&pr.chart(), 10, 11) {
        let (f, n) = (
            curvature_norm_formula(&pr, p[0]).unwrap(),
            curvature_norm(&g, &p).unwrap(),
        );
        assert!((f - n).abs() < 1e-6 * f);
    }
}

#[test]
fn case_six_representative() {
    let pr = case_representative(6).unwrap();
    assert_eq!((pr.a, pr.b, pr.c, pr.k), (1.0, -1.0, 0.0, 1.0));
}
