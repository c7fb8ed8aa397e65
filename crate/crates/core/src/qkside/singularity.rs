//! Radial distance to the curvature singularity at `bρ + 2c = 0`.

use crate::error::{GeoError, Result};
use crate::quad::{adaptive, Integral};

use super::GabcParams;

pub const DISTANCE_TOL: f64 = 1e-10;

/// `ρ* = −2c/b` if it bounds the admissible interval and the curvature norm
/// blows up there.
pub fn singular_endpoint(params: &GabcParams) -> Option<f64> {
    let (a, b, c) = (params.a, params.b, params.c);
    if b == 0.0 || b * b - 4.0 * a * c == 0.0 {
        return None;
    }
    let r = -2.0 * c / b;
    let (lo, hi) = params.interval();
    let close = |e: f64| e.is_finite() && (e - r).abs() <= 1e-12 * r.abs().max(1.0);
    (r > 0.0 && (close(lo) || close(hi))).then_some(r)
}

/// `∫ √|K(bρ + 2c)/(aρ² + bρ + c)| / (2ρ) dρ` from `ρ₀` to `ρ*`.
pub fn singularity_distance(params: &GabcParams, rho0: f64) -> Result<Integral> {
    let r = singular_endpoint(params).ok_or_else(|| {
        GeoError::NotApplicable(format!(
            "no curvature singularity bounds the ρ-interval of ({params})"
        ))
    })?;
    if !params.contains(&[rho0, 0.0, 0.0, 0.0], 0.0) {
        return Err(GeoError::Domain {
            point: vec![rho0, 0.0, 0.0, 0.0],
        });
    }
    let k = params.k.abs();
    let f =
        |rho: f64| (k * (params.linear(rho) / params.quadratic(rho)).abs()).sqrt() / (2.0 * rho);
    let (lo, hi) = if rho0 < r { (rho0, r) } else { (r, rho0) };
    let out = adaptive(f, lo, hi, DISTANCE_TOL)?;
    Ok(out)
}
