//! Small dense linear algebra over [`Scalar`] entries.
//!
//! Matrices are `Vec<Vec<S>>` in row-major nesting; dimensions here never
//! exceed a handful, so clarity wins over layout.

use crate::error::{Error, Result};
use crate::jet::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

/// Gauss–Jordan inverse with partial pivoting on the base values.
pub fn invert<S: Scalar>(m: &[Vec<S>]) -> Result<Matrix<S>> {
    let n = m.len();
    let proto = &m[0][0];
    let mut a: Matrix<S> = m.to_vec();
    let mut inv: Matrix<S> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| proto.constant_like(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    let scale = m
        .iter()
        .flatten()
        .map(|x| x.value().abs())
        .fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].value().abs().total_cmp(&a[s][col].value().abs()))
            .expect("non-empty range");
        if a[pivot][col].value().abs() <= scale * 1e-14 {
            return Err(Error::SingularMatrix);
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            for j in 0..n {
                a[row][j] = a[row][j].clone() - factor.clone() * a[col][j].clone();
                inv[row][j] = inv[row][j].clone() - factor.clone() * inv[col][j].clone();
            }
        }
    }
    Ok(inv)
}

/// Determinant by elimination with partial pivoting.
pub fn determinant<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    let mut a: Matrix<S> = m.to_vec();
    let mut det = m[0][0].constant_like(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].value().abs().total_cmp(&a[s][col].value().abs()))
            .expect("non-empty range");
        if a[pivot][col].value() == 0.0 {
            return det.zero_like();
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        let p = a[col][col].clone();
        det = det * p.clone();
        for row in col + 1..n {
            let factor = a[row][col].clone() / p.clone();
            for j in col..n {
                a[row][j] = a[row][j].clone() - factor.clone() * a[col][j].clone();
            }
        }
    }
    det
}

/// Cholesky factorisation of the base values; fails unless positive definite.
pub fn cholesky(m: &[Vec<f64>]) -> Option<Matrix<f64>> {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = m[i][i] - s;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

/// Bilinear form `u^T G v`.
pub fn inner<S: Scalar>(g: &[Vec<S>], u: &[S], v: &[S]) -> S {
    let mut acc = u[0].zero_like();
    for (i, gi) in g.iter().enumerate() {
        for (j, gij) in gi.iter().enumerate() {
            acc = acc + gij.clone() * u[i].clone() * v[j].clone();
        }
    }
    acc
}

/// Matrix-vector product.
pub fn apply<S: Scalar>(m: &[Vec<S>], v: &[S]) -> Vec<S> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(v[0].zero_like(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
}

/// Modified Gram–Schmidt in the metric `g`, in the order given.
///
/// Vectors whose remaining norm falls below `tolerance` times their original
/// norm are skipped when `skip_dependent` is set; otherwise that is an error.
pub fn gram_schmidt<S: Scalar>(
    g: &[Vec<S>],
    vectors: &[Vec<S>],
    skip_dependent: bool,
    tolerance: f64,
) -> Result<Vec<Vec<S>>> {
    let mut basis: Vec<Vec<S>> = Vec::new();
    for v in vectors {
        let original = inner(g, v, v).value().max(0.0).sqrt();
        let mut w = v.clone();
        for e in &basis {
            let c = inner(g, &w, e);
            w = w
                .iter()
                .zip(e)
                .map(|(wi, ei)| wi.clone() - c.clone() * ei.clone())
                .collect();
        }
        let norm2 = inner(g, &w, &w);
        if !(norm2.value() > (tolerance * original).powi(2)) || original == 0.0 {
            if skip_dependent {
                continue;
            }
            return Err(Error::NotPositiveDefinite { point: Vec::new() });
        }
        let inv_norm = norm2.sqrt();
        basis.push(w.into_iter().map(|x| x / inv_norm.clone()).collect());
    }
    Ok(basis)
}
