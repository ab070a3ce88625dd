//! Gauss–Legendre rules and small quadrature helpers.

use crate::C64;
use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss–Legendre nodes and weights on `(−1, 1)`, ascending nodes.
///
/// Computed by the Golub–Welsch eigenvalue method on the Jacobi matrix of the
/// Legendre recurrence; accurate to a few ulps for the sizes used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], 2.0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrize: the exact rule is symmetric about 0.
    for k in 0..n / 2 {
        let j = n - 1 - k;
        let x = 0.5 * (pairs[j].0 - pairs[k].0);
        let w = 0.5 * (pairs[j].1 + pairs[k].1);
        pairs[k] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// Integrate `f` over the complex segment `[a, b]` with an `n`-point Gauss rule.
pub fn gauss_segment<F: FnMut(C64) -> C64>(a: C64, b: C64, rule: &(Vec<f64>, Vec<f64>), mut f: F) -> C64 {
    let half = (b - a) * 0.5;
    let mid = (a + b) * 0.5;
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(&x, &w)| f(mid + half * x) * w)
        .sum::<C64>()
        * half
}
