//! One-dimensional quadrature.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{GeoError, Result};

/// Number of Gauss–Legendre nodes used for smooth parameter integrals.
pub const GAUSS_NODES: usize = 24;

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
pub fn unit_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(NonZeroUsize::new(GAUSS_NODES).expect("nonzero"))
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect()
    })
}

/// Result of an adaptive integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: u32,
}

/// Adaptive double-exponential quadrature of `f` over `[a, b]`; tolerates
/// integrable endpoint singularities.
pub fn adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    // x = a + (b − a) sin²(πs/2) flattens integrable endpoint singularities
    let w = b - a;
    let g = |s: f64| {
        let jac = 0.5 * w * std::f64::consts::PI * (std::f64::consts::PI * s).sin();
        if jac == 0.0 {
            return 0.0;
        }
        let x = if s < 0.5 {
            a + w * (0.5 * std::f64::consts::PI * s).sin().powi(2)
        } else {
            b - w * (0.5 * std::f64::consts::PI * s).cos().powi(2)
        };
        f(x) * jac
    };
    let out = quadrature::integrate(g, 0.0, 1.0, tol);
    if !out.integral.is_finite() || !out.error_estimate.is_finite() {
        return Err(GeoError::Quadrature(format!(
            "non-finite result on [{a}, {b}]"
        )));
    }
    Ok(Integral {
        value: out.integral,
        error_bound: out.error_estimate,
        evaluations: out.num_function_evaluations,
    })
}
