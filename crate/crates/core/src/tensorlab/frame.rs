//! Orthonormal frames and residual statistics.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Index position of one tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Up,
    Down,
}

/// A (pseudo-)orthonormal frame `e_a = E^i_a ∂_i` with dual coframe
/// `θ^a = (E⁻¹)^a_i dx^i` and signs `g(e_a, e_b) = ε_a δ_ab`.
#[derive(Clone, Debug)]
pub struct Frame {
    n: usize,
    e: Vec<f64>,
    coframe: Vec<f64>,
    signs: Vec<f64>,
}

fn inner(g: &[f64], n: usize, u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += g[i * n + j] * u[i] * v[j];
        }
    }
    s
}

impl Frame {
    /// The coordinate frame itself.
    pub fn coordinate(n: usize) -> Self {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Self {
            n,
            e: id.clone(),
            coframe: id,
            signs: vec![1.0; n],
        }
    }

    /// Gram–Schmidt on the coordinate frame; falls back to the eigenframe
    /// of `g` when a coordinate direction is nearly null.
    pub fn orthonormal(g: &[f64], n: usize) -> Result<Self> {
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        let mut ok = true;
        for k in 0..n {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            for (a, ea) in vecs.iter().enumerate() {
                let c = signs[a] * inner(g, n, &v, ea);
                for i in 0..n {
                    v[i] -= c * ea[i];
                }
            }
            let nn = inner(g, n, &v, &v);
            if nn.abs() <= 1e-8 * scale {
                ok = false;
                break;
            }
            let s = nn.abs().sqrt();
            v.iter_mut().for_each(|x| *x /= s);
            vecs.push(v);
            signs.push(nn.signum());
        }
        if !ok {
            return Self::eigenframe(g, n);
        }
        Self::from_vectors(vecs, signs, n)
    }

    fn eigenframe(g: &[f64], n: usize) -> Result<Self> {
        let m = DMatrix::from_row_slice(n, n, g);
        let eig = SymmetricEigen::new(m);
        let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut vecs = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for a in 0..n {
            let lam = eig.eigenvalues[a];
            if lam.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                return Err(GeoError::DegenerateMetric {
                    point: Vec::new(),
                    det: eig.eigenvalues.iter().product(),
                });
            }
            let s = lam.abs().sqrt();
            vecs.push((0..n).map(|i| eig.eigenvectors[(i, a)] / s).collect());
            signs.push(lam.signum());
        }
        Self::from_vectors(vecs, signs, n)
    }

    fn from_vectors(vecs: Vec<Vec<f64>>, signs: Vec<f64>, n: usize) -> Result<Self> {
        let mut e = vec![0.0; n * n];
        for (a, v) in vecs.iter().enumerate() {
            for i in 0..n {
                e[i * n + a] = v[i];
            }
        }
        let inv = DMatrix::from_row_slice(n, n, &e)
            .try_inverse()
            .ok_or_else(|| GeoError::DegenerateMetric {
                point: Vec::new(),
                det: 0.0,
            })?;
        let mut coframe = vec![0.0; n * n];
        for a in 0..n {
            for i in 0..n {
                coframe[a * n + i] = inv[(a, i)];
            }
        }
        Ok(Self {
            n,
            e,
            coframe,
            signs,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `E^i_a`, row-major in `(i, a)`.
    pub fn vectors(&self) -> &[f64] {
        &self.e
    }

    pub fn vector(&self, a: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.e[i * self.n + a]).collect()
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    /// Frame components of a tensor given in coordinates, slot by slot.
    pub fn transform(&self, comps: &[f64], slots: &[Slot]) -> Vec<f64> {
        let n = self.n;
        let r = slots.len();
        let mut cur = comps.to_vec();
        for (s, slot) in slots.iter().enumerate() {
            let inner_size = n.pow((r - s - 1) as u32);
            let outer = n.pow(s as u32);
            let mut next = vec![0.0; cur.len()];
            for o in 0..outer {
                for a in 0..n {
                    for t in 0..inner_size {
                        let mut acc = 0.0;
                        for i in 0..n {
                            let m = match slot {
                                Slot::Down => self.e[i * n + a],
                                Slot::Up => self.coframe[a * n + i],
                            };
                            acc += m * cur[(o * n + i) * inner_size + t];
                        }
                        next[(o * n + a) * inner_size + t] = acc;
                    }
                }
            }
            cur = next;
        }
        cur
    }
}

/// Largest absolute component; NaN counts as infinite.
pub fn max_component(comps: &[f64]) -> f64 {
    comps.iter().fold(0.0, |m: f64, v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            m.max(v.abs())
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Coordinate,
    Orthonormal,
}

/// Worst-case and mean pointwise magnitudes over a sample plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub argmax_point: Vec<f64>,
    pub frame: FrameKind,
}

impl Residual {
    /// Aggregates pointwise magnitudes in the given (sample) order.
    pub fn from_samples<I>(samples: I, frame: FrameKind) -> Self
    where
        I: IntoIterator<Item = (Vec<f64>, f64)>,
    {
        let mut max_abs = 0.0;
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut argmax_point = Vec::new();
        for (p, v) in samples {
            let v = if v.is_nan() { f64::INFINITY } else { v.abs() };
            if count == 0 || v > max_abs {
                max_abs = v;
                argmax_point = p;
            }
            sum += v;
            count += 1;
        }
        let mean_abs = if count == 0 { 0.0 } else { sum / count as f64 };
        Self {
            max_abs,
            mean_abs: mean_abs.min(max_abs),
            argmax_point,
            frame,
        }
    }

    pub fn single(point: &[f64], value: f64, frame: FrameKind) -> Self {
        Self::from_samples([(point.to_vec(), value)], frame)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_frame_diagonalizes_metric() {
        let g = [2.0, 0.5, 0.0, 0.5, -1.0, 0.3, 0.0, 0.3, 4.0];
        let f = Frame::orthonormal(&g, 3).unwrap();
        let gf = f.transform(&g, &[Slot::Down, Slot::Down]);
        for a in 0..3 {
            for b in 0..3 {
                let expect = if a == b { f.signs()[a] } else { 0.0 };
                assert!((gf[a * 3 + b] - expect).abs() < 1e-14);
            }
        }
        assert_eq!(f.signs().iter().filter(|&&s| s < 0.0).count(), 1);
    }

    #[test]
    fn null_coordinate_direction_uses_eigenframe() {
        // g = 2 dx dy
        let g = [0.0, 1.0, 1.0, 0.0];
        let f = Frame::orthonormal(&g, 2).unwrap();
        let gf = f.transform(&g, &[Slot::Down, Slot::Down]);
        assert!((gf[1]).abs() < 1e-14);
        assert!((gf[0].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_endomorphism_is_frame_invariant() {
        let g = [3.0, 1.0, 1.0, 2.0];
        let f = Frame::orthonormal(&g, 2).unwrap();
        let id = f.transform(&[1.0, 0.0, 0.0, 1.0], &[Slot::Up, Slot::Down]);
        assert!((id[0] - 1.0).abs() < 1e-14 && id[1].abs() < 1e-14);
        assert!(id[2].abs() < 1e-14 && (id[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn residual_statistics() {
        let r = Residual::from_samples(
            vec![(vec![0.0], 1.0), (vec![1.0], -3.0), (vec![2.0], 2.0)],
            FrameKind::Orthonormal,
        );
        assert_eq!(r.max_abs, 3.0);
        assert_eq!(r.mean_abs, 2.0);
        assert_eq!(r.argmax_point, vec![1.0]);
        let nan = Residual::from_samples(vec![(vec![0.0], f64::NAN)], FrameKind::Coordinate);
        assert!(nan.max_abs.is_infinite());
    }
}
