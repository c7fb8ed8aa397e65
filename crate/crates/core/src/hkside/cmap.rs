//! Flat rigid c-map models: the pseudo-hyper-Kähler structure on `ℂⁿ × ℂⁿ`
//! obtained from the flat conical special Kähler domain of signature
//! `(n−1, 1)`.
//!
//! Real coordinates: `z_j = x_j + i y_j` at indices `2j, 2j+1`, then
//! `w_j = u_j + i v_j` at `2n + 2j, 2n + 2j + 1`.
//! With `G = η ⊗ 1₂`, `η = diag(−1, 1, …, 1)`:
//! `g = diag(G, G⁻¹)`, `I₁ = diag(J, Jᵀ)`, `I₂ = [[0, −Ω⁻¹], [Ω, 0]]` with
//! `Ω = GJ`, and `I₃ = I₁I₂`.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::tensorlab::algebra::{
    constant_endo, constant_metric, constants, matmul_values, pairing_field,
};
use crate::tensorlab::chart::Chart;
use crate::tensorlab::complex::fundamental_form_field;
use crate::tensorlab::field::{EndoField, FormField, MetricField, ScalarField, VectorField};

use super::HyperKahler;

#[derive(Clone, Debug)]
pub struct RigidCmapModel {
    /// Quaternionic dimension (number of complex `z` coordinates).
    n: usize,
    conformal_perturbation: f64,
    hk: HyperKahler,
    z: VectorField,
    xi_euler: VectorField,
}

fn eta(j: usize) -> f64 {
    if j == 0 {
        -1.0
    } else {
        1.0
    }
}

impl RigidCmapModel {
    pub fn new(n: usize) -> Result<Self> {
        Self::build(n, 0.0)
    }

    /// The same complex structures with metric scaled by `1 + ε|w₀|²`; no
    /// longer hyper-Kähler for `ε ≠ 0` (negative control).
    pub fn perturbed(n: usize, epsilon: f64) -> Result<Self> {
        Self::build(n, epsilon)
    }

    fn build(n: usize, eps: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(GeoError::Parameters(format!(
                "rigid c-map models are registered for n = 1, 2, 3 (got {n})"
            )));
        }
        let m = n;
        let dim = 4 * m;
        let names: Vec<String> = (0..m)
            .flat_map(|j| [format!("x{j}"), format!("y{j}")])
            .chain((0..m).flat_map(|j| [format!("u{j}"), format!("v{j}")]))
            .collect();
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut sample_box = Vec::with_capacity(dim);
        sample_box.push((0.6, 1.4));
        sample_box.push((0.6, 1.4));
        for _ in 1..m {
            sample_box.push((-0.4, 0.4));
            sample_box.push((-0.4, 0.4));
        }
        for _ in 0..2 * m {
            sample_box.push((-1.0, 1.0));
        }
        // g(ξ, ξ) = −|z₀|² + Σ_{j≥1} |z_j|² < 0
        let chart = Arc::new(Chart::new(
            &format!("cmap{n}"),
            &name_refs,
            sample_box,
            move |p, margin| {
                let mut s = p[0] * p[0] + p[1] * p[1];
                for j in 1..m {
                    s -= p[2 * j] * p[2 * j] + p[2 * j + 1] * p[2 * j + 1];
                }
                s > margin
            },
        ));

        let h = 2 * m;
        let mut g = vec![0.0; dim * dim];
        for j in 0..m {
            for a in 0..2 {
                let i = 2 * j + a;
                g[i * dim + i] = eta(j);
                g[(h + i) * dim + h + i] = 1.0 / eta(j);
            }
        }
        // J on each real pair: ∂x ↦ ∂y, ∂y ↦ −∂x
        let mut jz = vec![0.0; h * h];
        for j in 0..m {
            jz[(2 * j + 1) * h + 2 * j] = 1.0;
            jz[(2 * j) * h + 2 * j + 1] = -1.0;
        }
        let mut i1 = vec![0.0; dim * dim];
        for r in 0..h {
            for c in 0..h {
                i1[r * dim + c] = jz[r * h + c];
                i1[(h + r) * dim + h + c] = jz[c * h + r];
            }
        }
        // Ω = GJ, Ω⁻¹ = −J G⁻¹
        let gz: Vec<f64> = (0..h * h)
            .map(|k| if k / h == k % h { eta(k / h / 2) } else { 0.0 })
            .collect();
        let gz_inv: Vec<f64> = gz
            .iter()
            .map(|&v| if v == 0.0 { 0.0 } else { 1.0 / v })
            .collect();
        let omega = matmul_values(&gz, &jz, h);
        let omega_inv: Vec<f64> = matmul_values(&jz, &gz_inv, h).iter().map(|v| -v).collect();
        let mut i2 = vec![0.0; dim * dim];
        for r in 0..h {
            for c in 0..h {
                i2[r * dim + h + c] = -omega_inv[r * h + c];
                i2[(h + r) * dim + c] = omega[r * h + c];
            }
        }
        let i3 = matmul_values(&i1, &i2, dim);

        let metric = if eps == 0.0 {
            constant_metric(Arc::clone(&chart), g)
        } else {
            let (u0, v0) = (h, h + 1);
            MetricField::from_jets(Arc::clone(&chart), move |c| {
                let f = &(&(&c[u0].square() + &c[v0].square()) * eps) + 1.0;
                g.iter().map(|&v| &f * v).collect()
            })
        };
        let complex: Vec<EndoField> = [i1, i2, i3]
            .into_iter()
            .map(|a| constant_endo(Arc::clone(&chart), a))
            .collect();
        let forms: Vec<FormField> = complex
            .iter()
            .map(|i| fundamental_form_field(&metric, i))
            .collect();
        let z = VectorField::from_jets(Arc::clone(&chart), move |c| {
            let zero = c[0].zero_like();
            let mut v = vec![zero; dim];
            for j in 0..m {
                v[2 * j] = c[2 * j + 1].clone();
                v[2 * j + 1] = -&c[2 * j];
            }
            v
        });
        let xi_euler = VectorField::from_jets(Arc::clone(&chart), move |c| {
            let zero = c[0].zero_like();
            let mut v = vec![zero; dim];
            for i in 0..h {
                v[i] = c[i].clone();
            }
            v
        });
        Ok(Self {
            n,
            conformal_perturbation: eps,
            hk: HyperKahler {
                name: if eps == 0.0 {
                    format!("cmap:{n}")
                } else {
                    format!("cmap:perturbed{n}")
                },
                metric,
                complex,
                forms,
            },
            z,
            xi_euler,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn is_perturbed(&self) -> bool {
        self.conformal_perturbation != 0.0
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.hk.chart()
    }

    pub fn hyper_kahler(&self) -> &HyperKahler {
        &self.hk
    }

    pub fn metric(&self) -> &MetricField {
        &self.hk.metric
    }

    /// `Z = Σ_j (y_j ∂x_j − x_j ∂y_j)`, i.e. `−i Σ (z_j ∂_{z_j} − z̄_j ∂_{z̄_j})`.
    pub fn z(&self) -> &VectorField {
        &self.z
    }

    /// The Euler field `ξ = Σ_j (x_j ∂x_j + y_j ∂y_j) = I₁Z`.
    pub fn xi_euler(&self) -> &VectorField {
        &self.xi_euler
    }

    /// `f_Z = −½ g(ξ, ξ)`, which satisfies `ι_Z ω₁ = −df_Z`.
    pub fn moment_map(&self) -> ScalarField {
        let gxx = pairing_field(self.metric(), &self.xi_euler, &self.xi_euler);
        let chart = Arc::clone(self.chart());
        ScalarField::new(chart, move |p, order| vec![&gxx.jet(p, order) * -0.5])
    }

    /// Whether coordinate index `i` is a vertical (`w`) direction.
    pub fn is_vertical(&self, i: usize) -> bool {
        i >= 2 * self.n
    }

    pub fn constant_matrix(&self, values: Vec<f64>) -> EndoField {
        let n = self.dim();
        EndoField::new(Arc::clone(self.chart()), move |_, order| {
            constants(n, order, &values)
        })
    }
}
