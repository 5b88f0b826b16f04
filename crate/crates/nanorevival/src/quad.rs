//! Gaussian quadrature rules via Golub-Welsch on the Jacobi matrix of the
//! orthogonal-polynomial recurrence.

use crate::linalg::eigh_tridiagonal;

/// Nodes and weights of an n-point rule.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> QuadRule {
    let n = diag.len();
    let eig = eigh_tridiagonal(diag, off, true).expect("Jacobi matrix eigensolve");
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let first = eig.vectors[k * n];
            (eig.values[k], mu0 * first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    QuadRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> QuadRule {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let kf = k as f64;
            kf / (4.0 * kf * kf - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&diag, &off, 2.0)
}

/// Gauss-Laguerre rule on [0, inf) with weight e^{-s}.
pub fn gauss_laguerre(n: usize) -> QuadRule {
    assert!(n >= 1);
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| k as f64).collect();
    golub_welsch(&diag, &off, 1.0)
}
