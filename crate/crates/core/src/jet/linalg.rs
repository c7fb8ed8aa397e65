//! Dense linear algebra over jets (row-major square matrices).

use super::Jet;

/// Pivot magnitude below which a jet matrix is treated as singular.
pub const SINGULAR_PIVOT: f64 = 1e-13;

/// Determinant of the value part, by partial-pivot elimination.
pub fn det_values(m: &[f64], n: usize) -> f64 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}

/// Solves `A X = B` for `B` with `cols` right-hand sides, by Gauss–Jordan
/// elimination pivoting on values. Returns `None` if a pivot is negligible
/// relative to the matrix scale.
pub fn solve(a: &[Jet], b: &[Jet], n: usize, cols: usize) -> Option<Vec<Jet>> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let scale = a
        .iter()
        .map(|x| x.value().abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .value()
                    .abs()
                    .total_cmp(&a[j * n + col].value().abs())
            })
            .unwrap();
        if a[piv * n + col].value().abs() <= SINGULAR_PIVOT * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            for k in 0..cols {
                b.swap(piv * cols + k, col * cols + k);
            }
        }
        let inv = a[col * n + col].recip();
        for k in 0..n {
            a[col * n + k] = &a[col * n + k] * &inv;
        }
        for k in 0..cols {
            b[col * cols + k] = &b[col * cols + k] * &inv;
        }
        for r in 0..n {
            if r == col || a[r * n + col].coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            let f = a[r * n + col].clone();
            for k in 0..n {
                let t = &f * &a[col * n + k];
                a[r * n + k] -= t;
            }
            for k in 0..cols {
                let t = &f * &b[col * cols + k];
                b[r * cols + k] -= t;
            }
        }
    }
    Some(b)
}

pub fn inverse(a: &[Jet], n: usize) -> Option<Vec<Jet>> {
    let proto = &a[0];
    let mut id = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            id.push(proto.lift(if i == j { 1.0 } else { 0.0 }));
        }
    }
    solve(a, &id, n, n)
}

/// Row-major product of an `n×m` and an `m×p` jet matrix.
pub fn matmul(a: &[Jet], b: &[Jet], n: usize, m: usize, p: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(n * p);
    for i in 0..n {
        for j in 0..p {
            let mut acc = a[i * m]
                .zero_like()
                .truncate(a[0].order().min(b[0].order()));
            for k in 0..m {
                acc += &a[i * m + k] * &b[k * p + j];
            }
            out.push(acc);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_jet_matrix_has_exact_derivative() {
        // A(x) = [[1 + x, 2], [x^2, 3]]; d(A^-1) = -A^-1 dA A^-1
        let x = Jet::variable(1, 2, 0.5, 0);
        let one = x.lift(1.0);
        let a = vec![&one + &x, x.lift(2.0), x.square(), x.lift(3.0)];
        let inv = inverse(&a, 2).unwrap();
        let av = [1.5, 2.0, 0.25, 3.0];
        let det = av[0] * av[3] - av[1] * av[2];
        let iv = [av[3] / det, -av[1] / det, -av[2] / det, av[0] / det];
        for k in 0..4 {
            assert!((inv[k].value() - iv[k]).abs() < 1e-14);
        }
        let da = [1.0, 0.0, 1.0, 0.0];
        for i in 0..2 {
            for j in 0..2 {
                let mut expect = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        expect -= iv[i * 2 + k] * da[k * 2 + l] * iv[l * 2 + j];
                    }
                }
                assert!((inv[i * 2 + j].derivative(&[0]) - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let x = Jet::variable(1, 1, 1.0, 0);
        let a = vec![x.clone(), x.clone(), x.clone(), x.clone()];
        assert!(inverse(&a, 2).is_none());
        assert_eq!(det_values(&[1.0, 2.0, 2.0, 4.0], 2), 0.0);
    }
}
