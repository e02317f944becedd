//! Tensor-product Gauss–Legendre quadrature on axis-aligned boxes.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over the box with `order` nodes per axis.
///
/// Nodes are visited in lexicographic order so the sum is reproducible.
pub fn integrate_box<F>(bounds: &[(f64, f64)], order: usize, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if bounds.is_empty() {
        return Err(Error::Dimension("integration box has no axes".into()));
    }
    if bounds.iter().any(|(lo, hi)| !(hi > lo)) {
        return Err(Error::Precondition(
            "box bounds must satisfy lo < hi".into(),
        ));
    }
    let (nodes, weights) = gauss_legendre(order);
    let d = bounds.len();
    let mut index = vec![0usize; d];
    let mut point = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (axis, &k) in index.iter().enumerate() {
            let (lo, hi) = bounds[axis];
            let half = 0.5 * (hi - lo);
            point[axis] = lo + half * (nodes[k] + 1.0);
            w *= half * weights[k];
        }
        total += w * f(&point)?;
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(total);
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < order {
                break;
            }
            index[axis] = 0;
        }
    }
}
