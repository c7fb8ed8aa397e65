//! The quaternionic Kähler side: the Przanowski–Tod ansatz, the separable
//! family `g^{a,b,c}`, its candidate Hermitian structures, Killing fields,
//! coordinate identifications and the distance to the curvature singularity.

pub mod cases;
pub mod hermitian;
pub mod killing;
pub mod pt;
pub mod singularity;

use std::fmt;
use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::hkside::toda::{rho_chart, TodaSolution, RHO, T, X, Y};
use crate::jet::Jet;
use crate::tensorlab::chart::Chart;
use crate::tensorlab::field::{MetricField, ScalarField};

pub use cases::{case_transform, CaseTransform};
pub use hermitian::{hermitian_pair, HermitianPair};
pub use killing::{classify_algebra, killing_fields, AlgebraLabel, KillingCatalog};
pub use pt::{pt_metric, PtChart};
pub use singularity::singularity_distance;

/// Parameters `(a, b, c, K)` of the separable family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GabcParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: f64,
    /// Admissible `ρ`-interval selected by the sign rule.
    interval: (f64, f64),
}

impl fmt::Display for GabcParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.k)
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let s = disc.sqrt();
    // numerically stable pair
    let q = -0.5 * (b + b.signum() * s);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

impl GabcParams {
    /// Validates the parameters and selects the first component of
    /// `{ρ > 0, aρ² + bρ + c > 0, K(bρ + 2c) < 0}`.
    pub fn new(a: f64, b: f64, c: f64, k: f64) -> Result<Self> {
        if ![a, b, c, k].iter().all(|v| v.is_finite()) {
            return Err(GeoError::Parameters("parameters must be finite".into()));
        }
        if k == 0.0 {
            return Err(GeoError::Parameters("K must be nonzero".into()));
        }
        let mut cuts: Vec<f64> = quadratic_roots(a, b, c);
        if b != 0.0 {
            cuts.push(-2.0 * c / b);
        }
        cuts.retain(|r| *r > 0.0);
        cuts.push(0.0);
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        cuts.dedup();
        cuts.push(f64::INFINITY);
        let ok = |r: f64| r > 0.0 && a * r * r + b * r + c > 0.0 && k * (b * r + 2.0 * c) < 0.0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                lo + 1.0
            };
            if ok(mid) {
                return Ok(Self {
                    a,
                    b,
                    c,
                    k,
                    interval: (lo, hi),
                });
            }
        }
        Err(GeoError::Parameters(format!(
            "no ρ > 0 with aρ²+bρ+c > 0 and sign(K) = −sign(bρ+2c) for (a,b,c,K) = ({a},{b},{c},{k})"
        )))
    }

    /// `K` from the sign rule `sign(K) = −sign(bρ + 2c)` with `|K| = 1`,
    /// using the first admissible component.
    pub fn with_sign_rule(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(a, b, c, -1.0).or_else(|_| Self::new(a, b, c, 1.0))
    }

    /// Parses `"a,b,c,K"`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| GeoError::Parameters(format!("'{s}': {e}")))?;
        match v.as_slice() {
            [a, b, c, k] => Self::new(*a, *b, *c, *k),
            _ => Err(GeoError::Parameters(format!("'{s}': expected a,b,c,K"))),
        }
    }

    /// Admissible `ρ`-interval (upper end possibly infinite).
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    /// Reduced scalar curvature `ν = 2/K`.
    pub fn nu(&self) -> f64 {
        2.0 / self.k
    }

    pub fn quadratic(&self, rho: f64) -> f64 {
        self.a * rho * rho + self.b * rho + self.c
    }

    pub fn linear(&self, rho: f64) -> f64 {
        self.b * rho + 2.0 * self.c
    }

    /// `bc(b² − 4ac) = 0`.
    pub fn locally_symmetric(&self) -> bool {
        self.b * self.c * (self.b * self.b - 4.0 * self.a * self.c) == 0.0
    }

    /// Sampling range for `ρ` inside the admissible interval.
    pub fn rho_box(&self) -> (f64, f64) {
        let (lo, hi) = self.interval;
        if hi.is_finite() {
            let w = hi - lo;
            (lo + 0.1 * w, hi - 0.1 * w)
        } else {
            let s = lo.abs().max(1.0);
            (lo + 0.2 * s, lo + 3.0 * s)
        }
    }

    /// Domain predicate on `(ρ, x, y, t)` with margin.
    pub fn contains(&self, p: &[f64], m: f64) -> bool {
        let r = p[RHO];
        let (lo, hi) = self.interval;
        let d = 1.0 + 0.5 * self.a * (p[X] * p[X] + p[Y] * p[Y]);
        r > lo + m && r < hi - m && self.quadratic(r) > m && self.k * self.linear(r) < -m && d > m
    }

    /// The `(ρ, x, y, t)` chart of the family.
    pub fn chart(&self) -> Arc<Chart> {
        let s = *self;
        let half = if self.a < 0.0 {
            (0.9 / (-0.5 * self.a).sqrt() / std::f64::consts::SQRT_2).min(0.5)
        } else {
            0.5
        };
        Arc::new(rho_chart(
            &format!("gabc:{s}"),
            vec![self.rho_box(), (-half, half), (-half, half), (-1.0, 1.0)],
            move |p, m| s.contains(p, m),
        ))
    }

    /// `u = ln(aρ² + bρ + c) − 2 ln(1 + (a/2)|ζ|²)`.
    pub fn u_jet(&self, rho: &Jet, x: &Jet, y: &Jet) -> Jet {
        let q = &(&(&rho.square() * self.a) + &(rho * self.b)) + self.c;
        let d = &(&(&x.square() + &y.square()) * (0.5 * self.a)) + 1.0;
        &q.ln() - &(&d.ln() * 2.0)
    }

    /// The Toda solution of the family.
    pub fn toda(&self) -> Result<TodaSolution> {
        let s = *self;
        TodaSolution::from_formula(self.chart(), self.k, move |r, x, y| s.u_jet(r, x, y))
    }

    /// The Liouville part `G = −2 ln(1 + (a/2)|ζ|²)` as a field.
    pub fn liouville_g(&self) -> ScalarField {
        let a = self.a;
        ScalarField::from_jets(self.chart(), move |c| {
            let d = &(&(&c[X].square() + &c[Y].square()) * (0.5 * a)) + 1.0;
            vec![&d.ln() * -2.0]
        })
    }
}

/// `g^{a,b,c}` components from coordinate jets `(ρ, x, y, t)`.
pub(crate) fn gabc_jets(s: (f64, f64, f64, f64), c: &[Jet]) -> Vec<Jet> {
    let (rho, x, y) = (&c[RHO], &c[X], &c[Y]);
    let (a, b, cc, k) = s;
    let quad = &(&(&rho.square() * a) + &(rho * b)) + cc;
    let lin = &(rho * b) + 2.0 * cc;
    let d = &(&(&x.square() + &y.square()) * (0.5 * a)) + 1.0;
    let pre = &rho.square().recip() * (-k / 4.0);
    let ratio = &lin / &quad;
    // −dt/K + b (y dx − x dy)/D
    let sx = &(y * b) / &d;
    let sy = &(x * -b) / &d;
    let st = rho.lift(-1.0 / k);
    let inv = &quad / &lin;
    let conf = &(&lin * 2.0) / &d.square();
    let mut g = vec![rho.zero_like(); 16];
    g[RHO * 4 + RHO] = &pre * &ratio;
    let ss = [(X, &sx), (Y, &sy), (T, &st)];
    for &(i, si) in &ss {
        for &(j, sj) in &ss {
            let mut v = &(&inv * si) * sj;
            if i == j && i != T {
                v += &conf;
            }
            g[i * 4 + j] = &pre * &v;
        }
    }
    g
}

/// `g^{a,b,c}` from its closed form.
pub fn gabc_metric(params: &GabcParams) -> MetricField {
    let s = (params.a, params.b, params.c, params.k);
    MetricField::from_jets(params.chart(), move |c| gabc_jets(s, c))
}

/// `6ν²(1 + b²(b² − 4ac)²(ρ/(bρ + 2c))⁶)` with `ν = 2/K`.
pub fn curvature_norm_formula(params: &GabcParams, rho: f64) -> Result<f64> {
    let lin = params.linear(rho);
    if lin == 0.0 {
        return Err(GeoError::Pole {
            factor: "bρ + 2c".into(),
            at: rho,
        });
    }
    let (a, b, c) = (params.a, params.b, params.c);
    let nu = params.nu();
    let disc = b * b - 4.0 * a * c;
    Ok(6.0 * nu * nu * (1.0 + b * b * disc * disc * (rho / lin).powi(6)))
}

/// `∂_ζ∂_ζ̄ G + a e^G` at `p`, with `∂_ζ∂_ζ̄ = ¼(∂_x² + ∂_y²)`.
pub fn liouville_residual(g: &ScalarField, a: f64, p: &[f64]) -> Result<f64> {
    g.chart().check(p)?;
    g.require_order(2)?;
    let j = g.jet(p, 2);
    Ok(0.25 * (j.derivative(&[X, X]) + j.derivative(&[Y, Y])) + a * j.value().exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_rule_selects_component() {
        let p = GabcParams::new(0.0, 1.0, 1.0, -1.0).unwrap();
        assert_eq!(p.interval(), (0.0, f64::INFINITY));
        assert!(GabcParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        let p = GabcParams::new(1.0, -1.0, 1.0, -1.0).unwrap();
        assert_eq!(p.interval(), (0.0, 2.0));
        let p = GabcParams::with_sign_rule(1.0, -1.0, 0.0).unwrap();
        assert_eq!(p.k, 1.0);
        assert!(GabcParams::parse("1,2").is_err());
    }

    #[test]
    fn curvature_norm_value() {
        let p = GabcParams::new(0.0, 1.0, 1.0, -1.0).unwrap();
        let v = curvature_norm_formula(&p, 1.0).unwrap();
        assert!((v - 24.0 * 730.0 / 729.0).abs() < 1e-12);
    }
}
