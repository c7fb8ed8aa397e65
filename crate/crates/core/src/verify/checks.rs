//! The named checks. Each one maps a model and a sample plan to pointwise
//! magnitudes; the verdict is decided by the caller from the expectation.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::hkside::highdim::highdim_condition;
use crate::hkside::rotating::{
    integrability_criterion, nabla_zz_residual, prop_ih_checks, psi_fit, rotating_identities,
};
use crate::hkside::sigma::{
    d_sigma_tilde_formula, iota_z_sigma_residual, kahler_condition, phi_by_quadrature,
    sigma_tilde_field, three_form_norm,
};
use crate::jet::Jet;
use crate::qkside::hermitian::orientation_signs;
use crate::qkside::killing::{killing_residual, structure_constants};
use crate::qkside::singularity::{singular_endpoint, singularity_distance};
use crate::qkside::{
    case_transform, classify_algebra, curvature_norm_formula, killing_fields, liouville_residual,
    AlgebraLabel,
};
use crate::sampling::sample_points;
use crate::tensorlab::algebra::{form_frame_norm, matmul_values};
use crate::tensorlab::complex::{almost_complex_residual, d_lee_form, nijenhuis};
use crate::tensorlab::connection::{metric_at, orthonormal_frame};
use crate::tensorlab::curvature::{curvature_norm, nabla_riemann, ricci, scalar_curvature};
use crate::tensorlab::field::{EndoField, ScalarField};
use crate::tensorlab::forms::exterior_derivative;
use crate::tensorlab::frame::{max_component, Frame, Slot};

use super::target::Model;
use super::Expected;

/// Residual floor above which an expected-fail check passes.
pub const NEGATIVE_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
pub struct CheckInfo {
    pub name: &'static str,
    pub tolerance: f64,
    pub summary: &'static str,
}

const fn info(name: &'static str, tolerance: f64, summary: &'static str) -> CheckInfo {
    CheckInfo {
        name,
        tolerance,
        summary,
    }
}

/// The registry, in listing order.
pub const CHECKS: [CheckInfo; 18] = [
    info("toda", 1e-9, "continuous Toda residual of u"),
    info("liouville", 1e-9, "Liouville residual of the ζ-part of u"),
    info("einstein", 1e-7, "Ric = (s/4) g, constant s, scalar-curvature sign"),
    info("killing", 1e-9, "Lie derivative of g along the four catalog fields"),
    info("rotating", 1e-9, "rotating Killing field identities, closed Kähler forms"),
    info("criterion", 1e-9, "df_H ∧ df_Z, ψ fit, ∇_Z Z in span(Z, I1 Z)"),
    info("prop_ih", 1e-9, "I_H = I1 + 2∇Z: g-compatibility with ω_H, skewness, commutation"),
    info("sigma_tilde", 1e-8, "closed-form dσ̃ against the numerical d, ι_Z σ̃"),
    info("xi_kahler", 1e-7, "ψ → ξ → φ by quadrature, Kähler condition of e^φ σ̃"),
    info("highdim", 1e-8, "∇_V Z = 0 on vertical V, deviation from −½ I1 equal to ½"),
    info("nijenhuis", 1e-8, "Nijenhuis tensors of J1, J̃1 (or of I_k)"),
    info("lee_closed", 1e-8, "dθ for the Lee form of (g, J̃1)"),
    info("orientation", 1e-9, "J1, J̃1 almost complex, compatible, opposite orientations"),
    info("algebra", 1e-8, "bracket closure and isomorphism type of the Killing algebra"),
    info("case_transform", 1e-8, "pullback of the identified metrics under the case maps"),
    info("curvnorm", 1e-6, "relative curvature norm against the closed formula"),
    info("symmetric", 1e-8, "∇R (vanishes iff bc(b² − 4ac) = 0)"),
    info("singularity_distance", 1e-6, "error bound of the distance to the singularity"),
];

pub fn check_info(name: &str) -> Result<&'static CheckInfo> {
    CHECKS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| GeoError::Registry {
            kind: "check",
            name: name.to_string(),
            available: CHECKS
                .iter()
                .map(|c| c.name)
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// Pointwise magnitudes (in sample order) and an optional remark.
#[derive(Clone, Debug, Default)]
pub struct Evaluation {
    pub samples: Vec<(Vec<f64>, f64)>,
    pub note: Option<String>,
}

impl Evaluation {
    fn new(samples: Vec<(Vec<f64>, f64)>) -> Self {
        Self {
            samples,
            note: None,
        }
    }
}

fn not_applicable(check: &str, model: &Model) -> GeoError {
    GeoError::NotApplicable(format!("{check} does not apply to {}", model.target))
}

/// Expectation used when a spec does not set one.
pub fn default_expected(name: &str, model: &Model) -> Expected {
    match (name, model.params) {
        ("symmetric", Some(p)) if !p.locally_symmetric() => Expected::Fail {
            floor: NEGATIVE_FLOOR,
        },
        _ => Expected::Pass,
    }
}

/// `f` at every point, in parallel, results in point order.
fn per_point<F>(points: &[Vec<f64>], f: F) -> Result<Vec<(Vec<f64>, f64)>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    points
        .par_iter()
        .map(|p| f(p).map(|v| (p.clone(), v)))
        .collect()
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m: f64, v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            m.max(v.abs())
        }
    })
}

fn named_worst(v: Vec<(String, f64)>) -> f64 {
    worst(v.into_iter().map(|(_, r)| r))
}

/// Evaluates check `name` on `model` over `samples` points drawn with `seed`.
pub fn evaluate(name: &str, model: &Model, samples: usize, seed: u64) -> Result<Evaluation> {
    check_info(name)?;
    let points = || -> Result<Vec<Vec<f64>>> {
        let pts = sample_points(&model.chart, samples, seed);
        if pts.is_empty() {
            return Err(GeoError::Precondition(format!(
                "no sample points on {}",
                model.target
            )));
        }
        Ok(pts)
    };
    let na = || not_applicable(name, model);
    match name {
        "toda" => {
            let sol = model.sol.as_ref().ok_or_else(na)?;
            Ok(Evaluation::new(per_point(&points()?, |p| {
                sol.residual(p).map(f64::abs)
            })?))
        }
        "liouville" => liouville(model, &points()?).ok_or_else(na)?,
        "einstein" => einstein(model, &points()?),
        "killing" => {
            let (qk, params) = model.qk.as_ref().zip(model.params).ok_or_else(na)?;
            let cat = killing_fields(&params);
            Ok(Evaluation::new(per_point(&points()?, |p| {
                killing_residual(&qk.metric, &cat, p)
            })?))
        }
        "rotating" => {
            let hk = model.hk.as_ref().ok_or_else(na)?;
            Ok(Evaluation::new(per_point(&points()?, |p| {
                rotating_identities(&hk.data, p).map(named_worst)
            })?))
        }
        "criterion" => {
            let hk = model.hk.as_ref().ok_or_else(na)?;
            let cmap = hk.cmap.is_some();
            Ok(Evaluation::new(per_point(&points()?, |p| {
                let c = integrability_criterion(&hk.data, p)?.max_abs;
                let (psi, fit) = psi_fit(&hk.data, p)?;
                let a = nabla_zz_residual(&hk.data, p)?;
                let psi_dev = if cmap { (psi + 1.0).abs() } else { 0.0 };
                Ok(worst([c, fit, a, psi_dev]))
            })?))
        }
        "prop_ih" => {
            let hk = model.hk.as_ref().ok_or_else(na)?;
            Ok(Evaluation::new(per_point(&points()?, |p| {
                prop_ih_checks(&hk.data, p).map(named_worst)
            })?))
        }
        "sigma_tilde" => {
            let hk = model.hk.as_ref().ok_or_else(na)?;
            let data = &hk.data;
            let sigma = sigma_tilde_field(data)?;
            let triple = data.hk.has_triple();
            Ok(Evaluation::new(per_point(&points()?, |p| {
                let frame = data.frame(p)?;
                let iz = form_frame_norm(&iota_z_sigma_residual(data, &sigma, p)?, 1, &frame);
                if !triple {
                    return Ok(iz);
                }
                let num = exterior_derivative(&sigma, p)?;
                let formula = d_sigma_tilde_formula(data, p)?;
                let diff: Vec<f64> = num.iter().zip(&formula).map(|(a, b)| a - b).collect();
                Ok(worst([iz, three_form_norm(data, &diff, p)?]))
            })?))
        }
        "xi_kahler" => {
            let hk = model.hk.as_ref().ok_or_else(na)?;
            if hk.data.dim() != 4 {
                return Err(na());
            }
            let data = &hk.data;
            let sigma = sigma_tilde_field(data)?;
            let (lo, hi) = model.chart.sample_box()[0];
            let phi = phi_by_quadrature(data, (lo, hi), 0.5 * (lo + hi))?;
            Ok(Evaluation::new(per_point(&points()?, |p| {
                three_form_norm(data, &kahler_condition(data, &phi, &sigma, p)?, p)
            })?))
        }
        "highdim" => {
            let hk = model.hk.as_ref().ok_or_else(na)?;
            let cm = hk.cmap.as_ref().filter(|c| c.n() >= 2).ok_or_else(na)?;
            Ok(Evaluation::new(per_point(&points()?, |p| {
                let out = highdim_condition(cm, &hk.data, p)?;
                Ok(worst([(out.deviation - 0.5).abs(), out.nabla_vertical]))
            })?))
        }
        "nijenhuis" => {
            let structures: Vec<&EndoField> = match (&model.qk, &model.hk) {
                (Some(qk), _) => vec![&qk.pair.j1_tilde, &qk.pair.j1],
                (None, Some(hk)) => hk.data.hk.complex.iter().collect(),
                (None, None) => return Err(na()),
            };
            let g = model.metric();
            Ok(Evaluation::new(per_point(&points()?, |p| {
                let frame = orthonormal_frame(g, p)?;
                let mut w = 0.0f64;
                for j in &structures {
                    let t = frame.transform(&nijenhuis(j, p)?, &[Slot::Up, Slot::Down, Slot::Down]);
                    w = w.max(max_component(&t));
                }
                Ok(w)
            })?))
        }
        "lee_closed" => {
            let qk = model.qk.as_ref().ok_or_else(na)?;
            let g = &qk.pt.metric;
            Ok(Evaluation::new(per_point(&points()?, |p| {
                let frame = orthonormal_frame(g, p)?;
                let d = d_lee_form(g, &qk.pair.j1_tilde, p)?;
                Ok(form_frame_norm(&d, 2, &frame))
            })?))
        }
        "orientation" => {
            let qk = model.qk.as_ref().ok_or_else(na)?;
            Ok(Evaluation::new(per_point(&points()?, |p| {
                let (a, b) = orientation_signs(&qk.pt, &qk.pair, p)?;
                let opposite = if a * b < 0.0 { 0.0 } else { 1.0 };
                let gv = metric_at(&qk.pt.metric, p)?;
                let frame = Frame::orthonormal(&gv, 4)?;
                let mut w: f64 = opposite;
                for j in [&qk.pair.j1, &qk.pair.j1_tilde] {
                    let jv = j.values(p);
                    w = w.max(almost_complex_residual(&jv, 4));
                    w = w.max(compatibility(&gv, &jv, &frame));
                }
                Ok(w)
            })?))
        }
        "algebra" => algebra(model, &points()?),
        "case_transform" => cases(model, samples, seed),
        "curvnorm" => {
            let (qk, params) = model.qk.as_ref().zip(model.params).ok_or_else(na)?;
            Ok(Evaluation::new(per_point(&points()?, |p| {
                let num = curvature_norm(&qk.metric, p)?;
                let f = curvature_norm_formula(&params, p[0])?;
                Ok((num - f).abs() / f.abs())
            })?))
        }
        "symmetric" => {
            let qk = model.qk.as_ref().ok_or_else(na)?;
            let slots = [Slot::Up, Slot::Down, Slot::Down, Slot::Down, Slot::Down];
            Ok(Evaluation::new(per_point(&points()?, |p| {
                let frame = orthonormal_frame(&qk.metric, p)?;
                Ok(max_component(
                    &frame.transform(&nabla_riemann(&qk.metric, p)?, &slots),
                ))
            })?))
        }
        "singularity_distance" => {
            let params = model
                .params
                .filter(|p| !model.perturbed && singular_endpoint(p).is_some())
                .ok_or_else(na)?;
            let (lo, hi) = params.rho_box();
            let rho0 = 0.5 * (lo + hi);
            let d = singularity_distance(&params, rho0)?;
            let ok = d.value.is_finite() && d.value > 0.0 && d.error_bound.is_finite();
            Ok(Evaluation {
                samples: vec![(
                    vec![rho0, 0.0, 0.0, 0.0],
                    if ok { d.error_bound } else { f64::INFINITY },
                )],
                note: Some(format!(
                    "distance {:.12} from rho = {rho0} to rho* = {}",
                    d.value,
                    singular_endpoint(&params).unwrap_or(f64::NAN)
                )),
            })
        }
        _ => unreachable!("registry names are matched above"),
    }
}

/// Orthonormal-frame size of `g(J·, J·) − g`.
fn compatibility(g: &[f64], j: &[f64], frame: &Frame) -> f64 {
    let n = 4;
    let jt: Vec<f64> = (0..n * n).map(|k| j[(k % n) * n + k / n]).collect();
    let jtg = matmul_values(&jt, g, n);
    let pulled = matmul_values(&jtg, j, n);
    let diff: Vec<f64> = pulled.iter().zip(g).map(|(a, b)| a - b).collect();
    max_component(&frame.transform(&diff, &[Slot::Down, Slot::Down]))
}

/// `G = u − ln(aρ² + bρ + c)` against `∂∂̄G + a e^G = 0`.
fn liouville(model: &Model, points: &[Vec<f64>]) -> Option<Result<Evaluation>> {
    let (sol, params) = model.sol.as_ref().zip(model.params)?;
    let u = sol.u().clone();
    let max = u.max_order();
    let g = ScalarField::new(Arc::clone(sol.chart()), move |p, order| {
        let rho = Jet::variable(4, order, p[0], 0);
        let q = &(&(&rho.square() * params.a) + &(&rho * params.b)) + params.c;
        vec![&u.jet(p, order) - &q.ln()]
    })
    .with_max_order(max);
    Some(
        per_point(points, |p| liouville_residual(&g, params.a, p).map(f64::abs))
            .map(Evaluation::new),
    )
}

fn einstein(model: &Model, points: &[Vec<f64>]) -> Result<Evaluation> {
    let g = model.metric();
    let n = g.dim();
    let raw: Vec<(f64, f64)> = points
        .par_iter()
        .map(|p| -> Result<(f64, f64)> {
            let ric = ricci(g, p)?;
            let s4 = scalar_curvature(g, p)? / 4.0;
            let gv = metric_at(g, p)?;
            let frame = Frame::orthonormal(&gv, n)?;
            let diff: Vec<f64> = ric.iter().zip(&gv).map(|(r, x)| r - s4 * x).collect();
            Ok((
                max_component(&frame.transform(&diff, &[Slot::Down, Slot::Down])),
                s4,
            ))
        })
        .collect::<Result<_>>()?;
    let s_ref = raw[0].1;
    let family = model.params.filter(|_| model.qk.is_some());
    let samples = points
        .iter()
        .zip(&raw)
        .map(|(p, &(dev, s4))| {
            let mut w = worst([dev, s4 - s_ref]);
            if let Some(params) = family {
                let sign = -params.linear(p[0]);
                if s4.signum() != sign.signum() {
                    w = w.max(1.0);
                }
                w = w.max((s4.abs() - (3.0 * params.nu()).abs()).abs());
            }
            (p.clone(), w)
        })
        .collect();
    Ok(Evaluation::new(samples))
}

fn algebra(model: &Model, points: &[Vec<f64>]) -> Result<Evaluation> {
    let (qk, params) = model
        .qk
        .as_ref()
        .zip(model.params)
        .ok_or_else(|| not_applicable("algebra", model))?;
    let cat = killing_fields(&params);
    let killing = per_point(points, |p| killing_residual(&qk.metric, &cat, p))?;
    let (c, closure) = structure_constants(&cat, points)?;
    let label = classify_algebra(&c, cat.fields.len());
    let expected = AlgebraLabel::expected(params.a);
    let (kp, kv) = killing
        .iter()
        .fold((points[0].clone(), 0.0f64), |(bp, bv), (p, v)| {
            if *v > bv {
                (p.clone(), *v)
            } else {
                (bp, bv)
            }
        });
    let mismatch = if label.as_ref() == Ok(&expected) {
        0.0
    } else {
        1.0
    };
    let note = match &label {
        Ok(l) => format!("algebra {l} (expected {expected}), closure {closure:.3e}"),
        Err(e) => format!("classification failed: {e}"),
    };
    Ok(Evaluation {
        samples: vec![(kp, worst([kv, closure, mismatch]))],
        note: Some(note),
    })
}

fn cases(model: &Model, samples: usize, seed: u64) -> Result<Evaluation> {
    let (qk, params) = model
        .qk
        .as_ref()
        .zip(model.params)
        .ok_or_else(|| not_applicable("case_transform", model))?;
    let items: Vec<u8> = match model.case_item {
        Some(i) => vec![i],
        None => (1..=10).collect(),
    };
    let mut out = Vec::new();
    let mut used = Vec::new();
    for item in items {
        let Ok(ct) = case_transform(item, &params) else {
            continue;
        };
        let pts = sample_points(&ct.source_chart(), samples, seed);
        if pts.is_empty() {
            continue;
        }
        out.extend(per_point(&pts, |p| ct.pullback_residual(&qk.metric, p))?);
        used.push(match ct.k_pedersen {
            Some(k) => format!("{item} (k = {k})"),
            None => item.to_string(),
        });
    }
    if used.is_empty() {
        return Err(not_applicable("case_transform", model));
    }
    Ok(Evaluation {
        samples: out,
        note: Some(format!("items {}", used.join(", "))),
    })
}
