//! The higher-dimensional conformally Kähler condition
//! `∇Z|_{(ℍZ)⊥} = −½ I₁|_{(ℍZ)⊥}` on rigid c-map models, where it fails on
//! vertical directions because `∇_V Z = 0` there.

use crate::error::{GeoError, Result};
use crate::tensorlab::algebra::{constants, endo_frame_norm, mat_vec};
use crate::tensorlab::connection::metric_at;
use crate::tensorlab::frame::{max_component, Frame};

use super::cmap::RigidCmapModel;
use super::deformation::projector_field;
use super::rotating::RotatingKillingData;

#[derive(Clone, Debug, PartialEq)]
pub struct HighdimOutcome {
    /// Largest frame component of `(∇Z + ½I₁)e_a` over the `(ℍZ)⊥` frame.
    pub deviation: f64,
    /// The same, over vertical frame vectors only.
    pub deviation_vertical: f64,
    /// Largest frame component of `∇_V Z` over vertical frame vectors.
    pub nabla_vertical: f64,
}

struct PerpFrame {
    vectors: Vec<Vec<f64>>,
    vertical: Vec<bool>,
}

fn inner(g: &[f64], n: usize, a: &[f64], b: &[f64]) -> f64 {
    (0..n)
        .map(|i| (0..n).map(|j| g[i * n + j] * a[i] * b[j]).sum::<f64>())
        .sum()
}

/// Orthonormal, `I₁`-adapted basis `(e, I₁e, …)` of `(ℍZ)⊥`, built from the
/// projected coordinate directions (`z` first, then `w`).
fn perp_frame(
    model: &RigidCmapModel,
    data: &RotatingKillingData,
    p: &[f64],
    g: &[f64],
) -> PerpFrame {
    let n = data.dim();
    let proj = projector_field(data).values(p);
    let i1 = data.hk.i1().values(p);
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut signs: Vec<f64> = Vec::new();
    let mut vertical = Vec::new();
    for c in 0..n {
        if vectors.len() >= n - 4 {
            break;
        }
        let mut v: Vec<f64> = (0..n)
            .map(|i| f64::from(i == c) - proj[i * n + c])
            .collect();
        for (e, s) in vectors.iter().zip(&signs) {
            let k = s * inner(g, n, &v, e);
            for i in 0..n {
                v[i] -= k * e[i];
            }
        }
        let nn = inner(g, n, &v, &v);
        if nn.abs() < 1e-8 {
            continue;
        }
        let scale = nn.abs().sqrt();
        v.iter_mut().for_each(|x| *x /= scale);
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| i1[i * n + j] * v[j]).sum())
            .collect();
        let vert = model.is_vertical(c);
        for u in [v, w] {
            vectors.push(u);
            signs.push(nn.signum());
            vertical.push(vert);
        }
    }
    PerpFrame { vectors, vertical }
}

pub fn highdim_condition(
    model: &RigidCmapModel,
    data: &RotatingKillingData,
    p: &[f64],
) -> Result<HighdimOutcome> {
    let n = data.dim();
    if model.n() < 2 {
        return Err(GeoError::Precondition("(ℍZ)⊥ is trivial for n = 1".into()));
    }
    let g = metric_at(&data.hk.metric, p)?;
    let pf = perp_frame(model, data, p, &g);
    if pf.vectors.len() != n - 4 {
        return Err(GeoError::RankDeficient {
            point: p.to_vec(),
            rank: n - pf.vectors.len(),
        });
    }
    // complete frame: (ℍZ)⊥ basis followed by normalized I_μ Z
    let gzz = data.g_zz.value(p);
    let mut all = pf.vectors.clone();
    for v in data.quaternionic_span() {
        all.push(v.values(p).iter().map(|x| x / gzz.abs().sqrt()).collect());
    }
    let mut e = vec![0.0; n * n];
    for (a, v) in all.iter().enumerate() {
        for i in 0..n {
            e[i * n + a] = v[i];
        }
    }
    let coframe = nalgebra::DMatrix::from_row_slice(n, n, &e)
        .try_inverse()
        .ok_or_else(|| GeoError::RankDeficient {
            point: p.to_vec(),
            rank: 0,
        })?;
    let comps = |v: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|a| (0..n).map(|i| coframe[(a, i)] * v[i]).sum())
            .collect()
    };
    let nz = data.nabla_z.values(p);
    let i1 = data.hk.i1().values(p);
    let dev: Vec<f64> = nz.iter().zip(&i1).map(|(a, b)| a + 0.5 * b).collect();
    let nzj = constants(n, 0, &nz);
    let devj = constants(n, 0, &dev);
    let mut out = HighdimOutcome {
        deviation: 0.0,
        deviation_vertical: 0.0,
        nabla_vertical: 0.0,
    };
    for (v, vert) in pf.vectors.iter().zip(&pf.vertical) {
        let vj = constants(n, 0, v);
        let dv: Vec<f64> = mat_vec(&devj, &vj, n).iter().map(|j| j.value()).collect();
        let d = max_component(&comps(&dv));
        out.deviation = out.deviation.max(d);
        if *vert {
            out.deviation_vertical = out.deviation_vertical.max(d);
            let nv: Vec<f64> = mat_vec(&nzj, &vj, n).iter().map(|j| j.value()).collect();
            out.nabla_vertical = out.nabla_vertical.max(max_component(&comps(&nv)));
        }
    }
    Ok(out)
}

/// `I_H − diag(−I₁|_z, I₁|_w)` in an orthonormal frame.
pub fn block_structure_residual(
    model: &RigidCmapModel,
    data: &RotatingKillingData,
    p: &[f64],
) -> Result<f64> {
    let n = data.dim();
    let g = metric_at(&data.hk.metric, p)?;
    let frame = Frame::orthonormal(&g, n)?;
    let ih = data.i_h.values(p);
    let i1 = data.hk.i1().values(p);
    let r: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let sign = if model.is_vertical(i) && model.is_vertical(j) {
                1.0
            } else {
                -1.0
            };
            ih[k] - sign * i1[k]
        })
        .collect();
    Ok(endo_frame_norm(&r, &frame))
}
