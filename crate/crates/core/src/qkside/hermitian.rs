//! The pair of Hermitian structures `J₁`, `J̃₁` of a Przanowski–Tod chart,
//! built on the orthonormal coframe
//! `e⁰ = √P/(2ρ) dρ`, `e¹ = (dt + Θ)/(2ρ√P)`, `e²,³ = √(2Pe^u)/(2ρ) dx, dy`.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::hkside::toda::{RHO, T, X, Y};
use crate::jet::linalg::inverse;
use crate::jet::Jet;
use crate::tensorlab::complex::fundamental_form;
use crate::tensorlab::field::EndoField;
use crate::tensorlab::forms::wedge;

use super::pt::PtChart;

#[derive(Clone, Debug)]
pub struct HermitianPair {
    /// `J₁E₀ = −E₁`, `J₁E₂ = E₃`; integrable for every `u`.
    pub j1: EndoField,
    /// `J₁` with the sign flipped on `span(E₀, E₁)`.
    pub j1_tilde: EndoField,
}

/// Coframe rows `e^a_i` at `order`.
fn coframe(pt: &PtChart, q: &[f64], order: usize) -> Vec<Jet> {
    let u = pt.sol.u().jet(q, order + 1);
    let k = pt.sol.k();
    let rho = Jet::variable(4, order, q[RHO], RHO);
    let p = &(&(&rho * &u.partial(RHO)) - 2.0) * k;
    let two_rho = &rho * 2.0;
    let sp = p.sqrt();
    let th = pt.theta.eval(q, order);
    let mut c = vec![rho.zero_like(); 16];
    c[RHO] = &sp / &two_rho;
    let s1 = (&two_rho * &sp).recip();
    for i in 0..4 {
        c[4 + i] = &s1 * &th[i];
    }
    c[4 + T] = &c[4 + T] + &s1;
    let h = &(&(&p * &u.truncate(order).exp()) * 2.0).sqrt() / &two_rho;
    c[8 + X] = h.clone();
    c[12 + Y] = h;
    c
}

/// `Σ_ab E_b M_ba e^a` with `J E_a = Σ_b M_ba E_b`.
fn endo(pt: &PtChart, m: [[f64; 4]; 4]) -> EndoField {
    let pt2 = pt.clone();
    let max = pt.metric.max_order();
    EndoField::new(Arc::clone(pt.sol.chart()), move |q, order| {
        let c = coframe(&pt2, q, order);
        let e = inverse(&c, 4).unwrap_or_else(|| vec![Jet::constant(4, order, f64::NAN); 16]);
        let mut out = vec![c[0].zero_like(); 16];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = c[0].zero_like();
                for a in 0..4 {
                    for b in 0..4 {
                        if m[b][a] != 0.0 {
                            acc += &(&e[i * 4 + b] * &c[a * 4 + j]) * m[b][a];
                        }
                    }
                }
                out[i * 4 + j] = acc;
            }
        }
        out
    })
    .with_max_order(max)
}

pub fn hermitian_pair(pt: &PtChart) -> HermitianPair {
    let mut m = [[0.0; 4]; 4];
    m[1][0] = -1.0;
    m[0][1] = 1.0;
    m[3][2] = 1.0;
    m[2][3] = -1.0;
    let j1 = endo(pt, m);
    m[1][0] = 1.0;
    m[0][1] = -1.0;
    HermitianPair {
        j1,
        j1_tilde: endo(pt, m),
    }
}

/// The `dρ∧dx∧dy∧dt` coefficients of `σ∧σ` for `J₁` and `J̃₁`.
pub fn orientation_signs(pt: &PtChart, pair: &HermitianPair, p: &[f64]) -> Result<(f64, f64)> {
    let top = |j: &EndoField| -> Result<f64> {
        let s = fundamental_form(&pt.metric, j, p)?;
        let w = wedge(&s, 2, &s, 2, 4);
        Ok(w[0])
    };
    let (a, b) = (top(&pair.j1)?, top(&pair.j1_tilde)?);
    if !(a.is_finite() && b.is_finite()) {
        return Err(GeoError::DegenerateForm(format!(
            "coframe degenerate at {p:?}"
        )));
    }
    Ok((a, b))
}
