//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients `c_α = ∂^α f / α!` of a scalar
//! quantity at a chart point, for every multi-index `α` with `|α| ≤ order`.
//! Arithmetic on jets propagates those coefficients exactly (up to rounding),
//! so curvature and its covariant derivative come out without any
//! finite-difference noise.
//!
//! Coefficients are stored in graded order (all degree-0 monomials, then
//! degree 1, ...), so the jet of order `k` is a prefix of the jet of order
//! `k + 1` and truncation is a slice.

pub mod linalg;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

/// Highest derivative order a jet can carry.
///
/// Order 3 suffices for ∇R on closed-form metrics; fields defined through
/// derivatives of other fields (the Przanowski–Tod potential, quadrature
/// gauges) need a few more.
pub const MAX_ORDER: usize = 6;

/// Largest chart dimension with a cached monomial table.
pub const MAX_DIM: usize = 16;

const NONE: u32 = u32::MAX;

pub(crate) struct MonomialTable {
    dim: usize,
    exps: Vec<Vec<u8>>,
    degree_start: Vec<usize>,
    shift: Vec<Vec<u32>>,
    unshift: Vec<Vec<u32>>,
    factorial: Vec<f64>,
    products: Vec<OnceLock<Vec<(u32, u32, u32)>>>,
}

impl MonomialTable {
    fn build(dim: usize) -> Self {
        let mut exps: Vec<Vec<u8>> = vec![vec![0; dim]];
        let mut degree_start = vec![0, 1];
        let mut prev: Vec<Vec<u8>> = vec![vec![0; dim]];
        for _ in 1..=MAX_ORDER {
            // degree d monomials: extend each degree d-1 monomial by the
            // variables at or after its last nonzero index (no duplicates)
            let mut next = Vec::new();
            for e in &prev {
                let last = e.iter().rposition(|&v| v > 0).unwrap_or(0);
                for i in last..dim {
                    let mut f = e.clone();
                    f[i] += 1;
                    next.push(f);
                }
            }
            exps.extend(next.iter().cloned());
            degree_start.push(exps.len());
            prev = next;
        }
        let lookup: HashMap<Vec<u8>, u32> = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let mut shift = vec![vec![NONE; exps.len()]; dim];
        let mut unshift = vec![vec![NONE; exps.len()]; dim];
        for (idx, e) in exps.iter().enumerate() {
            for i in 0..dim {
                let mut f = e.clone();
                f[i] += 1;
                if let Some(&j) = lookup.get(&f) {
                    shift[i][idx] = j;
                }
                if e[i] > 0 {
                    let mut g = e.clone();
                    g[i] -= 1;
                    unshift[i][idx] = lookup[&g];
                }
            }
        }
        let factorial = exps
            .iter()
            .map(|e| e.iter().map(|&k| fact(k as usize)).product())
            .collect();
        let products = (0..=MAX_ORDER).map(|_| OnceLock::new()).collect();
        Self {
            dim,
            exps,
            degree_start,
            shift,
            unshift,
            factorial,
            products,
        }
    }

    fn count(&self, order: usize) -> usize {
        self.degree_start[order + 1]
    }

    fn degree(&self, idx: usize) -> usize {
        self.degree_start.partition_point(|&s| s <= idx) - 1
    }

    /// Index pairs `(a, b, a·b)` contributing to a product truncated at `order`.
    fn products(&self, order: usize) -> &[(u32, u32, u32)] {
        self.products[order].get_or_init(|| {
            let n = self.count(order);
            let mut out = Vec::new();
            for a in 0..n {
                let da = self.degree(a);
                // walk b over monomials of degree ≤ order - da, composing
                // shifts of a along b's exponent
                for b in 0..self.count(order - da) {
                    let mut r = a as u32;
                    for (i, &k) in self.exps[b].iter().enumerate() {
                        for _ in 0..k {
                            r = self.shift[i][r as usize];
                        }
                    }
                    debug_assert_ne!(r, NONE);
                    out.push((a as u32, b as u32, r));
                }
            }
            out
        })
    }

    fn index_of(&self, exps: &[u8]) -> usize {
        let mut r = 0u32;
        for (i, &k) in exps.iter().enumerate() {
            for _ in 0..k {
                r = self.shift[i][r as usize];
            }
        }
        r as usize
    }
}

fn fact(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

fn table(dim: usize) -> &'static MonomialTable {
    static TABLES: OnceLock<Mutex<HashMap<usize, &'static MonomialTable>>> = OnceLock::new();
    assert!(
        (1..=MAX_DIM).contains(&dim),
        "jet dimension {dim} outside 1..={MAX_DIM}"
    );
    let map = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().expect("monomial table cache poisoned");
    guard
        .entry(dim)
        .or_insert_with(|| Box::leak(Box::new(MonomialTable::build(dim))))
}

/// Truncated Taylor expansion of a scalar at a chart point.
#[derive(Clone)]
pub struct Jet {
    table: &'static MonomialTable,
    order: u8,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.dim())
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(dim: usize, order: usize, value: f64) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let table = table(dim);
        let mut coeffs = vec![0.0; table.count(order)];
        coeffs[0] = value;
        Self {
            table,
            order: order as u8,
            coeffs,
        }
    }

    /// The coordinate function `x_var` expanded at `value`.
    pub fn variable(dim: usize, order: usize, value: f64, var: usize) -> Self {
        assert!(var < dim);
        let mut j = Self::constant(dim, order, value);
        if order >= 1 {
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// Seeds every coordinate of `point` as an independent variable.
    pub fn seed(point: &[f64], order: usize) -> Vec<Jet> {
        let n = point.len();
        (0..n)
            .map(|i| Self::variable(n, order, point[i], i))
            .collect()
    }

    /// A constant with the same dimension and order as `self`.
    pub fn lift(&self, value: f64) -> Self {
        Self::constant(self.dim(), self.order(), value)
    }

    pub fn zero_like(&self) -> Self {
        self.lift(0.0)
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `∂^α f` for the multi-index given as a list of variable indices.
    ///
    /// Panics if the jet order is below the number of indices.
    pub fn derivative(&self, indices: &[usize]) -> f64 {
        assert!(
            indices.len() <= self.order(),
            "derivative of order {} requested from a jet of order {}",
            indices.len(),
            self.order
        );
        let mut e = vec![0u8; self.dim()];
        for &i in indices {
            e[i] += 1;
        }
        let idx = self.table.index_of(&e);
        self.coeffs[idx] * self.table.factorial[idx]
    }

    pub fn gradient(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.derivative(&[i])).collect()
    }

    /// Symmetric matrix of second derivatives, row-major.
    pub fn hessian(&self) -> Vec<f64> {
        let n = self.dim();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.derivative(&[i, j]);
                h[i * n + j] = v;
                h[j * n + i] = v;
            }
        }
        h
    }

    /// Symmetric 3-tensor of third derivatives, index `(i*n + j)*n + k`.
    pub fn third(&self) -> Vec<f64> {
        let n = self.dim();
        let mut t = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t[(i * n + j) * n + k] = self.derivative(&[i, j, k]);
                }
            }
        }
        t
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self {
            table: self.table,
            order: order as u8,
            coeffs: self.coeffs[..self.table.count(order)].to_vec(),
        }
    }

    /// `∂f/∂x_var` as a jet of one order less.
    pub fn partial(&self, var: usize) -> Self {
        assert!(self.order >= 1, "partial derivative of an order-0 jet");
        let order = self.order() - 1;
        let t = self.table;
        let coeffs = (0..t.count(order))
            .map(|idx| (t.exps[idx][var] as f64 + 1.0) * self.coeffs[t.shift[var][idx] as usize])
            .collect();
        Self {
            table: t,
            order: order as u8,
            coeffs,
        }
    }

    /// Rebuilds a jet from its value and the jets of its partial derivatives.
    ///
    /// The gradient jets must be the partials of a single function (mixed
    /// partials agree); the result has order one more than the gradients.
    pub fn integrate(value: f64, gradient: &[Jet]) -> Self {
        let dim = gradient.len();
        let order = gradient.iter().map(Jet::order).min().unwrap_or(0) + 1;
        let mut out = Self::constant(dim, order, value);
        let t = out.table;
        for idx in 1..t.count(order) {
            let var = t.exps[idx]
                .iter()
                .position(|&k| k > 0)
                .expect("nonconstant");
            let k = t.exps[idx][var] as f64;
            out.coeffs[idx] = gradient[var].coeffs[t.unshift[var][idx] as usize] / k;
        }
        out
    }

    /// Substitutes `x_i ↦ scale_i · x_i` around the expansion point.
    pub fn scale_variables(&self, scale: &[f64]) -> Self {
        let t = self.table;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let mut f = c;
                for (i, &k) in t.exps[idx].iter().enumerate() {
                    if k > 0 {
                        f *= scale[i].powi(k as i32);
                    }
                }
                f
            })
            .collect();
        Self {
            table: t,
            order: self.order,
            coeffs,
        }
    }

    /// Applies a univariate function given its derivatives `f^(j)(value)`,
    /// `j = 0..=order`.
    fn compose(&self, derivs: &[f64]) -> Self {
        let k = self.order();
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut taylor: Vec<f64> = derivs.to_vec();
        for (j, c) in taylor.iter_mut().enumerate() {
            *c /= fact(j);
        }
        let mut r = self.lift(taylor[k]);
        for j in (0..k).rev() {
            r = &r * &h;
            r.coeffs[0] += taylor[j];
        }
        r
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; self.order() + 1])
    }

    pub fn ln(&self) -> Self {
        let v = self.value();
        let mut d = vec![v.ln()];
        for j in 1..=self.order() {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            d.push(sign * fact(j - 1) / v.powi(j as i32));
        }
        self.compose(&d)
    }

    pub fn powf(&self, p: f64) -> Self {
        let v = self.value();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut falling = 1.0;
        for j in 0..=self.order() {
            d.push(falling * v.powf(p - j as f64));
            falling *= p - j as f64;
        }
        self.compose(&d)
    }

    pub fn powi(&self, p: i32) -> Self {
        if p >= 0 {
            let mut r = self.lift(1.0);
            for _ in 0..p {
                r = &r * self;
            }
            return r;
        }
        let v = self.value();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut falling = 1.0;
        for j in 0..=self.order() {
            d.push(falling * v.powi(p - j as i32));
            falling *= (p - j as i32) as f64;
        }
        self.compose(&d)
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Self {
        let v = self.value();
        let d: Vec<f64> = (0..=self.order())
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * fact(j) / v.powi(j as i32 + 1)
            })
            .collect();
        self.compose(&d)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let d: Vec<f64> = (0..=self.order()).map(|j| cycle[j % 4]).collect();
        self.compose(&d)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let d: Vec<f64> = (0..=self.order()).map(|j| cycle[j % 4]).collect();
        self.compose(&d)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    fn assert_compatible(&self, other: &Jet) {
        debug_assert!(
            std::ptr::eq(self.table, other.table),
            "jets of dimension {} and {} combined",
            self.dim(),
            other.dim()
        );
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        self.assert_compatible(rhs);
        let order = self.order.min(rhs.order);
        let n = self.table.count(order as usize);
        let coeffs = (0..n).map(|i| self.coeffs[i] + rhs.coeffs[i]).collect();
        Jet {
            table: self.table,
            order,
            coeffs,
        }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        self.assert_compatible(rhs);
        let order = self.order.min(rhs.order);
        let n = self.table.count(order as usize);
        let coeffs = (0..n).map(|i| self.coeffs[i] - rhs.coeffs[i]).collect();
        Jet {
            table: self.table,
            order,
            coeffs,
        }
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        self.assert_compatible(rhs);
        let order = self.order.min(rhs.order);
        let n = self.table.count(order as usize);
        let mut coeffs = vec![0.0; n];
        for &(a, b, r) in self.table.products(order as usize) {
            coeffs[r as usize] += self.coeffs[a as usize] * rhs.coeffs[b as usize];
        }
        Jet {
            table: self.table,
            order,
            coeffs,
        }
    }
}

impl<'a> Div<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn div(self, rhs: &'a Jet) -> Jet {
        self * &rhs.recip()
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            table: self.table,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.coeffs.iter_mut().for_each(|c| *c = -*c);
        self
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut r = self.clone();
        r.coeffs[0] += rhs;
        r
    }
}

impl Sub<f64> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self + (-rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        Jet {
            table: self.table,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * rhs).collect(),
        }
    }
}

impl Div<f64> for &Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs * self
    }
}

impl Add<&Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        rhs + self
    }
}

impl Sub<&Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        &(-rhs) + self
    }
}

impl Div<&Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        &rhs.recip() * self
    }
}

// Owned-operand forms, so formulas can be written without sprinkling `&`.
macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &'a Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Jet> for &'a Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.assert_compatible(rhs);
        if rhs.order < self.order {
            self.order = rhs.order;
            self.coeffs.truncate(self.table.count(self.order()));
        }
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c += r;
        }
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self += &rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        self.assert_compatible(rhs);
        if rhs.order < self.order {
            self.order = rhs.order;
            self.coeffs.truncate(self.table.count(self.order()));
        }
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c -= r;
        }
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self -= &rhs;
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= rhs);
    }
}

/// Sum of `a_i * b_i`, starting from a zero of `a[0]`'s shape.
pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    let mut acc = a[0].zero_like().truncate(a[0].order().min(b[0].order()));
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Values of a slice of jets.
pub fn values(jets: &[Jet]) -> Vec<f64> {
    jets.iter().map(Jet::value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn variable_has_unit_gradient() {
        let x = Jet::variable(3, 2, 1.5, 1);
        assert_eq!(x.value(), 1.5);
        assert_eq!(x.gradient(), vec![0.0, 1.0, 0.0]);
        assert!(x.hessian().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn product_of_polynomials_matches_hand_derivatives() {
        // f = x^2 y + 3 y^3 at (2, -1)
        let p = Jet::seed(&[2.0, -1.0], 3);
        let f = &(&p[0] * &p[0]) * &p[1] + &(&p[1] * &p[1]) * &p[1] * 3.0;
        assert_eq!(f.value(), -4.0 - 3.0);
        assert_eq!(f.gradient(), vec![2.0 * 2.0 * -1.0, 4.0 + 9.0]);
        assert_eq!(f.derivative(&[0, 0]), -2.0);
        assert_eq!(f.derivative(&[0, 1]), 4.0);
        assert_eq!(f.derivative(&[1, 1]), -18.0);
        assert_eq!(f.derivative(&[0, 0, 1]), 2.0);
        assert_eq!(f.derivative(&[1, 1, 1]), 18.0);
        assert_eq!(f.derivative(&[0, 0, 0]), 0.0);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x = Jet::variable(1, 4, 0.7, 0);
        let e = x.exp();
        for k in 0..=4 {
            let idx = vec![0; k];
            assert!(close(e.derivative(&idx), 0.7f64.exp(), 1e-14));
        }
        let l = x.ln();
        assert!(close(l.derivative(&[0]), 1.0 / 0.7, 1e-14));
        assert!(close(l.derivative(&[0, 0]), -1.0 / 0.49, 1e-14));
        assert!(close(l.derivative(&[0, 0, 0]), 2.0 / 0.343, 1e-13));
        let s = x.sin();
        assert!(close(s.derivative(&[0, 0, 0]), -0.7f64.cos(), 1e-14));
        let r = x.recip();
        assert!(close(r.derivative(&[0, 0]), 2.0 / 0.343, 1e-13));
        let q = x.sqrt();
        assert!(close(q.derivative(&[0]), 0.5 / 0.7f64.sqrt(), 1e-14));
        let p = x.powi(-2);
        assert!(close(p.derivative(&[0, 0]), 6.0 / 0.7f64.powi(4), 1e-13));
    }

    #[test]
    fn partial_lowers_order_and_commutes() {
        let p = Jet::seed(&[0.3, 0.4], 3);
        let f = (&p[0] * &p[1]).exp() * &p[0];
        let fx = f.partial(0);
        let fxy = fx.partial(1);
        let fyx = f.partial(1).partial(0);
        assert_eq!(fx.order(), 2);
        assert!(close(fxy.value(), fyx.value(), 1e-14));
        assert!(close(fxy.value(), f.derivative(&[0, 1]), 1e-14));
        assert!(close(
            fx.derivative(&[1, 1]),
            f.derivative(&[0, 1, 1]),
            1e-14
        ));
    }

    #[test]
    fn integrate_inverts_partial() {
        let p = Jet::seed(&[0.3, -0.2, 1.1], 4);
        let f = (&p[0] * &p[1] + &p[2]).sin() * &p[2];
        let grads: Vec<Jet> = (0..3).map(|i| f.partial(i)).collect();
        let g = Jet::integrate(f.value(), &grads);
        for (a, b) in g.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let a = Jet::variable(2, 3, 1.0, 0);
        let b = Jet::variable(2, 1, 2.0, 1);
        let c = &a * &b;
        assert_eq!(c.order(), 1);
        assert_eq!(c.gradient(), vec![2.0, 1.0]);
    }

    #[test]
    fn scale_variables_is_chain_rule_for_diagonal_maps() {
        // f(x, y) = exp(x) y^2; g(s, t) = f(2s, -t) expanded at s = x/2, t = -y
        let p = Jet::seed(&[0.5, 1.5], 3);
        let f = p[0].exp() * p[1].square();
        let g = f.scale_variables(&[2.0, -1.0]);
        assert!(close(g.derivative(&[0]), 2.0 * f.derivative(&[0]), 1e-14));
        assert!(close(
            g.derivative(&[0, 1, 1]),
            2.0 * f.derivative(&[0, 1, 1]),
            1e-14
        ));
        assert!(close(g.derivative(&[1]), -f.derivative(&[1]), 1e-14));
    }
}
