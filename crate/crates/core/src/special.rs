//! Log-binomials and Gauss–Hermite quadrature.

use nalgebra::{DMatrix, SymmetricEigen};

/// `ln k!` for `k = 0..=max`, accumulated as sums of logarithms.
pub(crate) fn ln_factorials(max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(max + 1);
    let mut acc = 0.0f64;
    table.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// `ln C(n, k)` from a factorial table covering `n`.
pub(crate) fn ln_binomial(table: &[f64], n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    table[n] - table[k] - table[n - k]
}

/// Nodes and weights for `int exp(-x^2) f(x) dx` (Golub–Welsch).
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = off;
        jacobi[(k, k - 1)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|k| (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}
