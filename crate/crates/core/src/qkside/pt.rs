//! The Przanowski–Tod ansatz
//! `g = (1/4ρ²)(P dρ² + 2P e^u (dx² + dy²) + (dt + Θ)²/P)`,
//! `P = K(ρ u_ρ − 2)`, `dΘ = (P_y dx − P_x dy)∧dρ − 2∂_ρ(P e^u) dx∧dy`.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::hkside::toda::{TodaSolution, RHO, T, X, Y};
use crate::jet::Jet;
use crate::quad::unit_rule;
use crate::sampling::{sample_points, DEFAULT_SEED};
use crate::tensorlab::field::{FormField, MetricField, ScalarField};

use super::GabcParams;

const VALIDATION_SAMPLES: usize = 64;

#[derive(Clone, Debug)]
pub struct PtChart {
    pub sol: TodaSolution,
    pub p: ScalarField,
    pub theta: FormField,
    pub metric: MetricField,
}

/// Components `(ρx, ρy, xy)` of the prescribed `dΘ` as jets of order `order`.
fn prescribed(sol: &TodaSolution, q: &[f64], order: usize) -> [Jet; 3] {
    let k = sol.k();
    let u = sol.u().jet(q, order + 2);
    let rho = Jet::variable(4, order + 1, q[RHO], RHO);
    let p = &(&(&rho * &u.partial(RHO)) - 2.0) * k;
    let pe = &p * &u.truncate(order + 1).exp();
    [&p.partial(Y) * -1.0, p.partial(X), &pe.partial(RHO) * -2.0]
}

/// Prescribed `dΘ` as a two-form field (components `ρx, ρy, ρt, xy, xt, yt`).
pub fn prescribed_d_theta(sol: &TodaSolution) -> FormField {
    let s = sol.clone();
    FormField::new(Arc::clone(sol.chart()), 2, move |q, order| {
        let [a, b, c] = prescribed(&s, q, order);
        let z = a.zero_like();
        vec![a, b, z.clone(), c, z.clone(), z]
    })
    .with_max_order(sol.u().max_order().saturating_sub(2))
}

/// `Θ` with `Θ_ρ = Θ_t = 0`, integrated along `ρ` from `ρ₀` and, on the
/// slice `ρ = ρ₀`, along `x` from `x₀`.
fn line_integrated_theta(sol: &TodaSolution, rho0: f64, x0: f64) -> FormField {
    let s = sol.clone();
    let rule = unit_rule();
    FormField::new(Arc::clone(sol.chart()), 1, move |p, order| {
        let seed = Jet::seed(p, order);
        let mut tx = Jet::constant(4, order, 0.0);
        let mut ty = Jet::constant(4, order, 0.0);
        let mut slice = Jet::constant(4, order, 0.0);
        for &(node, w) in rule {
            let mut q = p.to_vec();
            q[RHO] = rho0 + node * (p[RHO] - rho0);
            let [a, b, _] = prescribed(&s, &q, order);
            let scale = [node, 1.0, 1.0, 1.0];
            tx += &a.scale_variables(&scale) * w;
            ty += &b.scale_variables(&scale) * w;
            let mut q = p.to_vec();
            q[RHO] = rho0;
            q[X] = x0 + node * (p[X] - x0);
            let [_, _, c] = prescribed(&s, &q, order);
            slice += &c.scale_variables(&[0.0, node, 1.0, 1.0]) * w;
        }
        let dr = &seed[RHO] - rho0;
        let dx = &seed[X] - x0;
        let z = tx.zero_like();
        vec![z.clone(), &dr * &tx, &(&dr * &ty) + &(&dx * &slice), z]
    })
    .with_max_order(sol.u().max_order().saturating_sub(2))
}

fn assemble(sol: &TodaSolution, theta: FormField) -> Result<PtChart> {
    let chart = Arc::clone(sol.chart());
    let s = sol.clone();
    let k = sol.k();
    let p_field = sol.p_field();
    for q in sample_points(&chart, VALIDATION_SAMPLES, DEFAULT_SEED) {
        let v = p_field.value(&q);
        if !(v > 0.0) {
            return Err(GeoError::Signature(format!(
                "P = K(ρu_ρ − 2) = {v:e} ≤ 0 at {q:?}"
            )));
        }
    }
    let th = theta.clone();
    let max = sol.u().max_order().saturating_sub(1).min(theta.max_order());
    let metric = MetricField::new(chart, move |q, order| {
        let u = s.u().jet(q, order + 1);
        let rho = Jet::variable(4, order, q[RHO], RHO);
        let p = &(&(&rho * &u.partial(RHO)) - 2.0) * k;
        let e = u.truncate(order).exp();
        let pre = &rho.square().recip() * 0.25;
        let th = th.eval(q, order);
        // dt + Θ
        let mut f = th.clone();
        f[T] = &f[T] + 1.0;
        let ip = p.recip();
        let mut g = vec![rho.zero_like(); 16];
        for i in 0..4 {
            for j in 0..4 {
                g[i * 4 + j] = &(&ip * &f[i]) * &f[j];
            }
        }
        g[RHO * 4 + RHO] += &p;
        let h = &(&p * &e) * 2.0;
        g[X * 4 + X] += &h;
        g[Y * 4 + Y] += &h;
        g.iter().map(|c| &pre * c).collect()
    })
    .with_max_order(max);
    Ok(PtChart {
        sol: sol.clone(),
        p: p_field,
        theta,
        metric,
    })
}

/// Przanowski–Tod metric of a general `u`, with `Θ` by line integration
/// from the centre of the sample box.
pub fn pt_metric(sol: &TodaSolution) -> Result<PtChart> {
    let b = sol.chart().sample_box();
    let rho0 = 0.5 * (b[RHO].0 + b[RHO].1);
    let x0 = 0.5 * (b[X].0 + b[X].1);
    assemble(sol, line_integrated_theta(sol, rho0, x0))
}

/// Przanowski–Tod chart of the family with the closed form
/// `Θ = −Kb (y dx − x dy)/(1 + (a/2)|ζ|²)`.
pub fn pt_from_params(params: &GabcParams) -> Result<PtChart> {
    let sol = params.toda()?;
    let s = *params;
    let theta = FormField::from_jets(Arc::clone(sol.chart()), 1, move |c| {
        let d = &(&(&c[X].square() + &c[Y].square()) * (0.5 * s.a)) + 1.0;
        let f = &d.recip() * (-s.k * s.b);
        let z = c[0].zero_like();
        vec![z.clone(), &f * &c[Y], &(&f * &c[X]) * -1.0, z]
    });
    assemble(&sol, theta)
}
