//! Coordinate changes identifying `g^{a,b,c}` with familiar metrics, one
//! per parameter range (items 1–10). Each transform carries the map from
//! target coordinates to `(ρ, x, y, t)`, its inverse and the target metric.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::hkside::toda::{RHO, T, X, Y};
use crate::jet::Jet;
use crate::sampling::sample_points;
use crate::tensorlab::chart::Chart;
use crate::tensorlab::field::MetricField;
use crate::tensorlab::frame::{Frame, Slot};

use super::{gabc_jets, GabcParams};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape {
    /// `−(K/2)(ds² + e^{−2s}(dξ₁² + dξ₂² + dτ²))`.
    Hyperbolic,
    /// `g^{0,1,c}` with the same `K`.
    Rescaled,
    /// `F [dr²/h + h dτ²/(4K²) + 4r²|dw|²/(1 + η|w|²)²]`, `h = ε(1 + δr²)`.
    Limiting {
        f: f64,
        eps: f64,
        delta: f64,
        eta: f64,
    },
    /// `−2Kσ/(1 − σϱ²)² [m/n dϱ² + η ϱ² m (ς₁² + ς₂²) + ϱ² n/m ς₃²]`,
    /// `m = 1 + σkϱ²`, `n = 1 + kϱ⁴`.
    Pedersen { sigma: f64, eta: f64 },
}

#[derive(Clone, Debug)]
pub struct CaseTransform {
    pub item: u8,
    pub params: GabcParams,
    /// `4ac/b² − 1` for the `ϱ`-forms (items 3, 5, 6, 7, 9, 10).
    pub k_pedersen: Option<f64>,
    shape: Shape,
    /// Required sign of `2aρ + b` (items 5, 6, 9, 10).
    side: Option<f64>,
    /// Scale of `ρ` (items 3–10) and of `ζ`.
    len: f64,
    zeta: f64,
}

fn precondition(msg: &str) -> GeoError {
    GeoError::Precondition(msg.into())
}

/// Builds the transform of `item` for `params`, checking its parameter range.
pub fn case_transform(item: u8, params: &GabcParams) -> Result<CaseTransform> {
    let (a, b, c, k) = (params.a, params.b, params.c, params.k);
    let (lo, hi) = params.interval();
    // 2aρ + b changes sign at r0; `below` / `above`: part of the interval on either side
    let r0 = if a != 0.0 { -b / (2.0 * a) } else { f64::NAN };
    let below = lo < r0;
    let above = hi > r0;
    let kp = if b != 0.0 {
        Some(4.0 * a * c / (b * b) - 1.0)
    } else {
        None
    };
    let ok = match item {
        1 => a == 0.0 && b == 0.0,
        2 => a == 0.0 && b > 0.0,
        3 => a > 0.0 && b > 0.0,
        4 => a > 0.0 && b == 0.0,
        5 => b < 0.0 && a > 0.0 && below,
        6 => b < 0.0 && a > 0.0 && above,
        7 => a < 0.0 && b < 0.0,
        8 => a < 0.0 && b == 0.0,
        9 => a < 0.0 && b > 0.0 && below,
        10 => a < 0.0 && b > 0.0 && above,
        _ => return Err(precondition("case item must be in 1..=10")),
    };
    if !ok {
        return Err(precondition(&format!(
            "parameters ({a},{b},{c},{k}) on ρ ∈ ({lo},{hi}) are outside the range of item {item}"
        )));
    }
    let side = match item {
        5 | 10 => Some(-1.0),
        6 | 9 => Some(1.0),
        _ => None,
    };
    let eta = a.signum();
    let (shape, len, zeta, k_pedersen) = match item {
        1 => (Shape::Hyperbolic, 1.0, (2.0 * c).sqrt(), None),
        2 => (Shape::Rescaled, b, b, None),
        4 | 8 => {
            let len = (c.abs() / a.abs()).sqrt();
            let shape = match (item, c > 0.0) {
                (4, true) => Shape::Limiting {
                    f: -0.5 * k,
                    eps: 1.0,
                    delta: 1.0,
                    eta,
                },
                (4, false) => Shape::Limiting {
                    f: 0.5 * k,
                    eps: 1.0,
                    delta: -1.0,
                    eta,
                },
                _ => Shape::Limiting {
                    f: -0.5 * k,
                    eps: -1.0,
                    delta: -1.0,
                    eta,
                },
            };
            (shape, len, (a.abs() / 2.0).sqrt(), None)
        }
        3 | 5 | 7 | 9 => (
            Shape::Pedersen { sigma: 1.0, eta },
            b / (2.0 * a),
            (a.abs() / 2.0).sqrt(),
            kp,
        ),
        _ => (
            Shape::Pedersen { sigma: -1.0, eta },
            -b / (2.0 * a),
            (a.abs() / 2.0).sqrt(),
            kp,
        ),
    };
    Ok(CaseTransform {
        item,
        params: *params,
        k_pedersen,
        shape,
        side,
        len,
        zeta,
    })
}

impl CaseTransform {
    /// Source chart, cut to the required side of `2aρ + b = 0`.
    pub fn source_chart(&self) -> Arc<Chart> {
        let base = self.params.chart();
        let Some(side) = self.side else { return base };
        let (a, b) = (self.params.a, self.params.b);
        let r0 = -b / (2.0 * a);
        let mut bx = base.sample_box().to_vec();
        let (lo, hi) = bx[RHO];
        // the sign of 2aρ + b is `side` below r0 iff side·a < 0
        bx[RHO] = if side * a < 0.0 {
            (lo, hi.min(r0))
        } else {
            (lo.max(r0), hi)
        };
        let chart = base.with_sample_box(bx).restrict(
            &format!("{}:item{}", base.name(), self.item),
            move |p, m| side * (2.0 * a * p[RHO] + b) > m,
        );
        Arc::new(chart)
    }

    /// Target coordinates of a source point `(ρ, x, y, t)`.
    pub fn inverse(&self, p: &[f64]) -> Vec<f64> {
        let k = self.params.k;
        let (rho, x, y, t) = (p[RHO], p[X], p[Y], p[T]);
        let z = self.zeta;
        match self.shape {
            Shape::Hyperbolic => vec![rho.ln(), z * x, z * y, t / (2.0 * k)],
            Shape::Rescaled => vec![z * rho, z * x, z * y, z * t],
            Shape::Limiting { .. } => vec![self.len / rho, z * x, z * y, t / self.len],
            Shape::Pedersen { sigma, .. } => {
                let s = rho / self.len + sigma;
                let (a, b) = (self.params.a, self.params.b);
                vec![s.powf(-0.5), z * x, z * y, -2.0 * a * t / (b * k)]
            }
        }
    }

    /// Source coordinates as jets of the target coordinates.
    pub fn forward(&self, q: &[Jet]) -> Vec<Jet> {
        let k = self.params.k;
        let z = 1.0 / self.zeta;
        let (x, y) = (&q[1] * z, &q[2] * z);
        match self.shape {
            Shape::Hyperbolic => vec![q[0].exp(), x, y, &q[3] * (2.0 * k)],
            Shape::Rescaled => vec![&q[0] * z, x, y, &q[3] * z],
            Shape::Limiting { .. } => vec![self.len / &q[0], x, y, &q[3] * self.len],
            Shape::Pedersen { sigma, .. } => {
                let (a, b) = (self.params.a, self.params.b);
                let s = q[0].square().recip();
                vec![&(&s - sigma) * self.len, x, y, &q[3] * (-b * k / (2.0 * a))]
            }
        }
    }

    /// Target metric components at `q`.
    pub fn target(&self, q: &[Jet]) -> Vec<Jet> {
        let p = &self.params;
        let k = p.k;
        let z0 = q[0].zero_like();
        let mut g = vec![z0.clone(); 16];
        match self.shape {
            Shape::Hyperbolic => {
                let e = &(&q[0] * -2.0).exp() * (-0.5 * k);
                g[0] = q[0].lift(-0.5 * k);
                g[5] = e.clone();
                g[10] = e.clone();
                g[15] = e;
            }
            Shape::Rescaled => return gabc_jets((0.0, 1.0, p.c, k), q),
            Shape::Limiting { f, eps, delta, eta } => {
                let r = &q[0];
                let h = &(&(&r.square() * delta) + 1.0) * eps;
                let w2 = &q[1].square() + &q[2].square();
                let conf = &(&(&r.square() * 4.0) / &(&(&w2 * eta) + 1.0).square()) * f;
                g[0] = &h.recip() * f;
                g[5] = conf.clone();
                g[10] = conf;
                g[15] = &h * (f / (4.0 * k * k));
            }
            Shape::Pedersen { sigma, eta } => {
                let kk = self.k_pedersen.expect("ϱ-forms carry k");
                let r2 = q[0].square();
                let m = &(&r2 * (sigma * kk)) + 1.0;
                let n = &(&r2.square() * kk) + 1.0;
                let pre = &(1.0 - &(&r2 * sigma)).square().recip() * (-2.0 * k * sigma);
                let (x1, x2) = (&q[1], &q[2]);
                let dd = &(&(&x1.square() + &x2.square()) * eta) + 1.0;
                // ς₃ = ¼dφ + η(ξ₂dξ₁ − ξ₁dξ₂)/(1 + η|ξ|²)
                let s3 = [
                    z0.clone(),
                    &(x2 / &dd) * eta,
                    &(x1 / &dd) * -eta,
                    q[0].lift(0.25),
                ];
                let c12 = &(&(&r2 * &m) * eta) / &dd.square();
                let c3 = &(&r2 * &n) / &m;
                for i in 0..4 {
                    for j in 0..4 {
                        g[i * 4 + j] = &(&c3 * &s3[i]) * &s3[j];
                    }
                }
                g[0] += &(&m / &n);
                g[5] += &c12;
                g[10] += &c12;
                return g.iter().map(|v| &pre * v).collect();
            }
        }
        g
    }

    /// Largest component of `φ*g^{a,b,c} − g_target` in a target
    /// orthonormal frame, at the target image of the source point `p`.
    pub fn residual_at(&self, p: &[f64]) -> Result<f64> {
        let s = (self.params.a, self.params.b, self.params.c, self.params.k);
        self.residual_with(p, |sv| {
            Ok(gabc_jets(s, &Jet::seed(sv, 0))
                .iter()
                .map(Jet::value)
                .collect())
        })
    }

    /// As [`residual_at`](Self::residual_at), pulling back `g` instead of
    /// the closed form of `g^{a,b,c}`.
    pub fn pullback_residual(&self, g: &MetricField, p: &[f64]) -> Result<f64> {
        self.residual_with(p, |sv| {
            g.chart().check(sv)?;
            Ok(g.values(sv))
        })
    }

    fn residual_with<F>(&self, p: &[f64], source: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let q = self.inverse(p);
        let seed = Jet::seed(&q, 1);
        let src = self.forward(&seed);
        let sv: Vec<f64> = src.iter().map(Jet::value).collect();
        let roundtrip = sv
            .iter()
            .zip(p)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if !roundtrip.is_finite()
            || roundtrip > 1e-9 * (1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        {
            return Err(precondition(&format!(
                "coordinate map does not invert at {p:?}"
            )));
        }
        let jac: Vec<Vec<f64>> = src.iter().map(Jet::gradient).collect();
        let gs = source(&sv)?;
        let gt: Vec<f64> = self
            .target(&Jet::seed(&q, 0))
            .iter()
            .map(Jet::value)
            .collect();
        let mut diff = vec![0.0; 16];
        for al in 0..4 {
            for be in 0..4 {
                let mut acc = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        acc += jac[i][al] * gs[i * 4 + j] * jac[j][be];
                    }
                }
                diff[al * 4 + be] = acc - gt[al * 4 + be];
            }
        }
        let frame = Frame::orthonormal(&gt, 4)?;
        let t = frame.transform(&diff, &[Slot::Down, Slot::Down]);
        if t.iter().any(|v| !v.is_finite()) {
            return Err(precondition(&format!("non-finite pullback at {p:?}")));
        }
        Ok(t.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }

    /// Worst residual over `count` sample points of the source chart.
    pub fn residual(&self, count: usize, seed: u64) -> Result<(f64, Vec<f64>)> {
        let mut worst = (0.0, Vec::new());
        let pts = sample_points(&self.source_chart(), count, seed);
        if pts.is_empty() {
            return Err(precondition("no sample points on the source side"));
        }
        for p in pts {
            let r = self.residual_at(&p)?;
            if r >= worst.0 {
                worst = (r, p);
            }
        }
        Ok(worst)
    }
}
