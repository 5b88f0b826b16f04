//! Small dense/banded linear-algebra kernels: compensated summation and a
//! symmetric tridiagonal eigensolver. These run in the hot paths, so they are
//! hand-rolled over `Vec<f64>` rather than pulled from a matrix crate.

use crate::error::{Error, Result};

/// Compensated accumulator (Kahan-Babuška / Neumaier variant, which also
/// handles summands larger than the running sum).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Pairwise (cascade) summation over a slice. Deterministic for a fixed input
/// order; error grows only logarithmically with length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 32;
    if values.len() <= BASE {
        let mut acc = KahanSum::new();
        for &v in values {
            acc.add(v);
        }
        return acc.value();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Eigendecomposition of a symmetric tridiagonal matrix.
///
/// `diag` has length n, `off` length n-1 (coupling i <-> i+1). Eigenvectors,
/// when requested, are returned column-major: column k (`vectors[k*n..(k+1)*n]`)
/// is the unit eigenvector of `values[k]`. Implicit-shift QL with eigenvector
/// accumulation; eigenvalues are not sorted.
pub struct TridiagEigen {
    pub values: Vec<f64>,
    /// Column-major n x n matrix; empty when vectors were not requested.
    pub vectors: Vec<f64>,
}

pub fn eigh_tridiagonal(diag: &[f64], off: &[f64], want_vectors: bool) -> Result<TridiagEigen> {
    let n = diag.len();
    assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
    if n == 0 {
        return Ok(TridiagEigen {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }

    let mut d = diag.to_vec();
    // e is padded to length n; e[n-1] is scratch.
    let mut e = Vec::with_capacity(n);
    e.extend_from_slice(off);
    e.push(0.0);

    let mut q = if want_vectors {
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        q
    } else {
        Vec::new()
    };

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible off-diagonal element to split the problem.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::EigenFailure { size: n, index: l });
            }

            // Wilkinson-style shift from the leading 2x2.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                if want_vectors {
                    let (left, right) = q.split_at_mut((i + 1) * n);
                    let col_i = &mut left[i * n..(i + 1) * n];
                    let col_i1 = &mut right[..n];
                    for k in 0..n {
                        let f = col_i1[k];
                        col_i1[k] = s * col_i[k] + c * f;
                        col_i[k] = c * col_i[k] - s * f;
                    }
                }

                if i == l {
                    break;
                }
            }
            if r == 0.0 && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    Ok(TridiagEigen {
        values: d,
        vectors: q,
    })
}

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below
/// `x`, by Sturm sequence (LDLᵀ pivot signs).
pub fn sturm_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let guard = f64::MIN_POSITIVE.sqrt();
    let mut count = 0usize;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let q_safe = if q.abs() < guard { guard.copysign(q) } else { q };
        q = (diag[i] - x) - off[i - 1] * off[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix via Sturm bisection.
pub fn smallest_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    assert!(n > 0);
    if n == 1 {
        return diag[0];
    }
    // Gershgorin interval.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let e_left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let e_right = if i < n - 1 { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - e_left - e_right);
        hi = hi.max(diag[i] + e_left + e_right);
    }
    let mut a = lo;
    let mut b = hi;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if sturm_count_below(diag, off, mid) == 0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
