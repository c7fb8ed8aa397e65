//! Exterior algebra on compressed (strictly increasing index) storage.
//!
//! Conventions: `(α∧β)` carries the shuffle normalization, so
//! `(dx∧dy)_{xy} = 1`; `(dω)_{i₀…i_p} = Σ_k (−1)^k ∂_{i_k} ω_{i₀…î_k…i_p}`;
//! `(ι_V ω)_{j…} = V^i ω_{i j…}`.

use std::sync::Arc;

use crate::error::Result;
use crate::jet::Jet;

use super::field::{FormField, VectorField};

/// Arithmetic needed by the form operations; implemented for plain values
/// and for jets.
pub trait Coeff: Clone {
    fn zero_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scaled(&self, f: f64) -> Self;
}

impl Coeff for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, f: f64) -> Self {
        self * f
    }
}

impl Coeff for Jet {
    fn zero_like(&self) -> Self {
        Jet::zero_like(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, f: f64) -> Self {
        self * f
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Number of independent components of a p-form in dimension n.
pub fn form_len(n: usize, p: usize) -> usize {
    binomial(n, p)
}

/// All strictly increasing p-tuples from `0..n`, lexicographically.
pub fn combos(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, p));
    if p > n {
        return out;
    }
    let mut c: Vec<usize> = (0..p).collect();
    loop {
        out.push(c.clone());
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - p + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        c[i] += 1;
        for j in i + 1..p {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Lexicographic rank of a strictly increasing tuple.
pub fn combo_index(n: usize, c: &[usize]) -> usize {
    let p = c.len();
    let mut rank = 0;
    let mut prev: isize = -1;
    for (i, &ci) in c.iter().enumerate() {
        for j in (prev + 1) as usize..ci {
            rank += binomial(n - 1 - j, p - 1 - i);
        }
        prev = ci as isize;
    }
    rank
}

/// Sorts an index tuple, returning the permutation sign, or `None` when an
/// index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Component `ω_{i₁…i_p}` for an arbitrary index tuple.
pub fn component<T: Coeff>(comps: &[T], n: usize, idx: &[usize]) -> Option<(T, f64)> {
    let (sorted, sign) = sort_with_sign(idx)?;
    Some((comps[combo_index(n, &sorted)].clone(), sign))
}

pub fn component_value(comps: &[f64], n: usize, idx: &[usize]) -> f64 {
    component(comps, n, idx).map_or(0.0, |(v, s)| v * s)
}

/// Exterior derivative of jet components: order drops by one.
pub fn d_jets(comps: &[Jet], n: usize, p: usize) -> Vec<Jet> {
    let targets = combos(n, p + 1);
    let proto = comps
        .first()
        .cloned()
        .expect("form with at least one component");
    let order = proto.order() - 1;
    targets
        .iter()
        .map(|t| {
            let mut acc = proto.zero_like().truncate(order);
            for k in 0..t.len() {
                let mut rest = t.clone();
                let var = rest.remove(k);
                let src = &comps[combo_index(n, &rest)];
                let term = src.partial(var);
                if k % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
        .collect()
}

/// Exterior derivative of a zero-form given as a jet.
pub fn d_scalar(f: &Jet) -> Vec<Jet> {
    (0..f.dim()).map(|i| f.partial(i)).collect()
}

fn shuffle_sign(a: &[usize], b: &[usize]) -> f64 {
    // parity of the permutation sorting the concatenation a ++ b, with a
    // and b each already increasing
    let mut inversions = 0;
    for &x in a {
        inversions += b.iter().filter(|&&y| y < x).count();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn wedge<T: Coeff>(alpha: &[T], p: usize, beta: &[T], q: usize, n: usize) -> Vec<T> {
    let proto = alpha[0].zero_like();
    if p + q > n {
        return Vec::new();
    }
    combos(n, p + q)
        .into_iter()
        .map(|target| {
            let mut acc = proto.clone();
            for sub in combos(p + q, p) {
                let a: Vec<usize> = sub.iter().map(|&k| target[k]).collect();
                let b: Vec<usize> = target.iter().copied().filter(|i| !a.contains(i)).collect();
                let s = shuffle_sign(&a, &b);
                let term = alpha[combo_index(n, &a)].times(&beta[combo_index(n, &b)]);
                acc = acc.plus(&term.scaled(s));
            }
            acc
        })
        .collect()
}

pub fn interior<T: Coeff>(v: &[T], omega: &[T], p: usize, n: usize) -> Vec<T> {
    assert!(p >= 1, "interior product of a 0-form");
    let proto = omega[0].zero_like();
    combos(n, p - 1)
        .into_iter()
        .map(|rest| {
            let mut acc = proto.clone();
            for i in 0..n {
                if rest.contains(&i) {
                    continue;
                }
                let mut idx = vec![i];
                idx.extend_from_slice(&rest);
                if let Some((c, s)) = component(omega, n, &idx) {
                    acc = acc.plus(&v[i].times(&c).scaled(s));
                }
            }
            acc
        })
        .collect()
}

/// Full antisymmetric matrix `ω_ij` of a compressed 2-form.
pub fn two_form_matrix<T: Coeff>(comps: &[T], n: usize) -> Vec<T> {
    let proto = comps[0].zero_like();
    let mut m = vec![proto; n * n];
    for (k, c) in combos(n, 2).iter().enumerate() {
        m[c[0] * n + c[1]] = comps[k].clone();
        m[c[1] * n + c[0]] = comps[k].scaled(-1.0);
    }
    m
}

/// Compressed 2-form from the upper triangle of a matrix.
pub fn two_form_from_matrix<T: Coeff>(m: &[T], n: usize) -> Vec<T> {
    combos(n, 2)
        .iter()
        .map(|c| m[c[0] * n + c[1]].clone())
        .collect()
}

/// The exterior derivative of a form field at a point.
pub fn exterior_derivative(omega: &FormField, p: &[f64]) -> Result<Vec<f64>> {
    omega.chart().check(p)?;
    let n = omega.dim();
    if omega.degree() + 1 > n {
        return Ok(Vec::new());
    }
    let comps = omega.eval(p, 1);
    Ok(d_jets(&comps, n, omega.degree())
        .iter()
        .map(Jet::value)
        .collect())
}

/// `dω` as a field of degree `p + 1`.
pub fn exterior_derivative_field(omega: &FormField) -> FormField {
    let omega = omega.clone();
    let n = omega.dim();
    let p = omega.degree();
    FormField::new(Arc::clone(omega.chart()), p + 1, move |x, order| {
        if p + 1 > n {
            return Vec::new();
        }
        d_jets(&omega.eval(x, order + 1), n, p)
    })
}

pub fn wedge_field(alpha: &FormField, beta: &FormField) -> FormField {
    let (a, b) = (alpha.clone(), beta.clone());
    let n = a.dim();
    let (p, q) = (a.degree(), b.degree());
    FormField::new(Arc::clone(a.chart()), p + q, move |x, order| {
        wedge(&a.eval(x, order), p, &b.eval(x, order), q, n)
    })
}

pub fn interior_field(v: &VectorField, omega: &FormField) -> FormField {
    let (v, w) = (v.clone(), omega.clone());
    let n = w.dim();
    let p = w.degree();
    FormField::new(Arc::clone(w.chart()), p - 1, move |x, order| {
        interior(&v.eval(x, order), &w.eval(x, order), p, n)
    })
}

/// Pointwise wedge of form fields.
pub fn wedge_at(alpha: &FormField, beta: &FormField, p: &[f64]) -> Result<Vec<f64>> {
    alpha.chart().check(p)?;
    Ok(wedge(
        &alpha.values(p),
        alpha.degree(),
        &beta.values(p),
        beta.degree(),
        alpha.dim(),
    ))
}

pub fn interior_at(v: &VectorField, omega: &FormField, p: &[f64]) -> Result<Vec<f64>> {
    omega.chart().check(p)?;
    Ok(interior(
        &v.values(p),
        &omega.values(p),
        omega.degree(),
        omega.dim(),
    ))
}
