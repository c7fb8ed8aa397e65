//! The Boyer–Finley ansatz
//! `g_N = K u_ρ (dρ² + 2eᵘ(dx² + dy²)) + (4K/u_ρ)(dt − ½(u_y dx − u_x dy))²`
//! with Kähler form
//! `ω₁ = −2K dρ∧(dt − ½(u_y dx − u_x dy)) + 2K eᵘ u_ρ dx∧dy`,
//! rotating field `Z = ∂_t` and Hamiltonian `f_Z = −2Kρ` (`ι_Z ω₁ = −df_Z`).

use std::sync::Arc;

use crate::jet::Jet;
use crate::tensorlab::algebra::endo_from_form_field;
use crate::tensorlab::field::{
    coordinate_vector, FormField, MetricField, ScalarField, VectorField,
};

use super::toda::{TodaSolution, RHO, T, X, Y};
use super::HyperKahler;

/// Jets of `(u_ρ, eᵘ, A_x, A_y)` with `dt + A_x dx + A_y dy` the
/// connection form; all of order `order`.
fn potentials(sol: &TodaSolution, p: &[f64], order: usize) -> (Jet, Jet, Jet, Jet) {
    let u = sol.u().jet(p, order + 1);
    let u_rho = u.partial(RHO);
    let ax = &u.partial(Y) * -0.5;
    let ay = &u.partial(X) * 0.5;
    let e = u.truncate(order).exp();
    (u_rho, e, ax, ay)
}

pub fn boyer_finley_metric(sol: &TodaSolution) -> MetricField {
    let s = sol.clone();
    let k = sol.k();
    let max = sol.u().max_order().saturating_sub(1);
    MetricField::new(Arc::clone(sol.chart()), move |p, order| {
        let (u_rho, e, ax, ay) = potentials(&s, p, order);
        let w = &u_rho.recip() * (4.0 * k);
        let h = &(&u_rho * &e) * (2.0 * k);
        let zero = w.zero_like();
        let mut g = vec![zero; 16];
        g[RHO * 4 + RHO] = &u_rho * k;
        g[X * 4 + X] = &h + &(&w * &ax.square());
        g[Y * 4 + Y] = &h + &(&w * &ay.square());
        let xy = &(&w * &ax) * &ay;
        g[X * 4 + Y] = xy.clone();
        g[Y * 4 + X] = xy;
        let xt = &w * &ax;
        let yt = &w * &ay;
        g[X * 4 + T] = xt.clone();
        g[T * 4 + X] = xt;
        g[Y * 4 + T] = yt.clone();
        g[T * 4 + Y] = yt;
        g[T * 4 + T] = w;
        g
    })
    .with_max_order(max)
}

/// `ω₁ = g(I₁·, ·)` for `I₁ = g⁻¹ω̂` with
/// `ω̂ = 2K dρ∧(dt + A) − 2K e^u u_ρ dx∧dy`, i.e. `ω₁ = −ω̂`; components in
/// the order `ρx, ρy, ρt, xy, xt, yt`. The relative sign is the one for
/// which `dω̂ = 0` under `Δu = −2∂²_ρ eᵘ`.
pub fn omega1_bf(sol: &TodaSolution) -> FormField {
    let s = sol.clone();
    let k = sol.k();
    let max = sol.u().max_order().saturating_sub(1);
    FormField::new(Arc::clone(sol.chart()), 2, move |p, order| {
        let (u_rho, e, ax, ay) = potentials(&s, p, order);
        let zero = ax.zero_like();
        vec![
            &ax * (-2.0 * k),
            &ay * (-2.0 * k),
            zero.lift(-2.0 * k),
            &(&e * &u_rho) * (2.0 * k),
            zero.clone(),
            zero,
        ]
    })
    .with_max_order(max)
}

pub fn rotating_field(sol: &TodaSolution) -> VectorField {
    coordinate_vector(Arc::clone(sol.chart()), T)
}

/// `f_Z = −2Kρ`, so that `ι_Z ω₁ = −df_Z`.
pub fn moment_map(sol: &TodaSolution) -> ScalarField {
    let k = sol.k();
    ScalarField::from_jets(Arc::clone(sol.chart()), move |c| vec![&c[RHO] * (-2.0 * k)])
}

/// The Boyer–Finley chart with `I₁ = −g⁻¹ω₁`.
pub fn hyper_kahler(sol: &TodaSolution, name: &str) -> HyperKahler {
    let metric = boyer_finley_metric(sol);
    let omega = omega1_bf(sol);
    let i1 = endo_from_form_field(&metric, &omega);
    HyperKahler {
        name: name.to_string(),
        metric,
        complex: vec![i1],
        forms: vec![omega],
    }
}
