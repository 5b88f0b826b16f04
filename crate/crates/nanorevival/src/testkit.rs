//! Reference implementations used as independent oracles by the test suites.
//!
//! Nothing here is reached from the production paths: matrix elements come
//! from spherical quadrature over explicitly constructed harmonics, dense
//! eigenproblems go through a cyclic Jacobi solver, and small 3j symbols are
//! evaluated with exact i128 rational arithmetic.

use crate::quad::gauss_legendre;
use crate::thermal::ThermalRotorState;

/// Normalized associated Legendre value: Y_lm(θ, φ) = plm_norm(l, m, cosθ) e^{imφ},
/// Condon-Shortley phase included. Negative m via Y_{l,-m} = (-1)^m conj(Y_lm).
pub fn plm_norm(l: u32, m: i32, cos_theta: f64) -> f64 {
    let ma = m.unsigned_abs();
    if ma > l {
        return 0.0;
    }
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    // P̃_m^m by the diagonal recurrence.
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=ma {
        pmm *= -(((2 * k + 1) as f64) / ((2 * k) as f64)).sqrt() * sin_theta;
    }
    let value = if l == ma {
        pmm
    } else {
        let mut p_prev = pmm;
        let mut p_cur = ((2 * ma + 3) as f64).sqrt() * cos_theta * pmm;
        for ll in (ma + 2)..=l {
            let lf = ll as f64;
            let mf = ma as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            let p_next = a * (cos_theta * p_cur - b * p_prev);
            p_prev = p_cur;
            p_cur = p_next;
        }
        p_cur
    };
    if m < 0 && ma % 2 == 1 {
        -value
    } else {
        value
    }
}

/// <j1 m1| g(θ, φ) |j2 m2> for real g, by tensor-product quadrature:
/// Gauss-Legendre in cosθ crossed with the periodic trapezoid rule in φ.
/// Exact for the band-limited integrands used here.
pub fn quad_element<F>(j1: u32, m1: i32, j2: u32, m2: i32, g: F) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let n_theta = ((j1 + j2) as usize) + 12;
    let n_phi = 2 * (m1.unsigned_abs() + m2.unsigned_abs()) as usize + 24;
    let rule = gauss_legendre(n_theta);
    let dm = (m2 - m1) as f64;
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut total = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let p = plm_norm(j1, m1, u) * plm_norm(j2, m2, u);
        if p == 0.0 {
            continue;
        }
        let theta = u.acos();
        let mut phi_sum = 0.0;
        for k in 0..n_phi {
            let phi = (k as f64 + 0.5) * dphi;
            phi_sum += g(theta, phi) * (dm * phi).cos();
        }
        total += w * p * phi_sum * dphi;
    }
    total
}

/// Quadrature version of <jm|cos²β|j'm>.
pub fn cos2_element_quad(j: u32, j_prime: u32, m: i32) -> f64 {
    quad_element(j, m, j_prime, m, |theta, _| theta.cos() * theta.cos())
}

/// Quadrature version of <jm|cos⁴β|j'm>.
pub fn cos4_element_quad(j: u32, j_prime: u32, m: i32) -> f64 {
    quad_element(j, m, j_prime, m, |theta, _| theta.cos().powi(4))
}

/// Quadrature version of <jm|sin²β cos²α|jm'>.
pub fn sin2cos2_element_quad(j: u32, m: i32, m_prime: i32) -> f64 {
    quad_element(j, m, j, m_prime, |theta, phi| {
        let s = theta.sin();
        let c = phi.cos();
        s * s * c * c
    })
}

/// Cyclic Jacobi eigensolver for a dense symmetric matrix (row-major).
/// Returns (eigenvalues, eigenvectors column-major), unsorted.
pub fn jacobi_eigh(matrix: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for sweep in 0..100 {
        let mut off_norm = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off_norm += a[p * n + q] * a[p * n + q];
            }
        }
        if off_norm.sqrt() < 1e-14 * (1.0 + frobenius(&a, n)) {
            break;
        }
        assert!(sweep < 99, "jacobi did not converge");
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[p * n + k];
                    let vkq = v[q * n + k];
                    v[p * n + k] = c * vkp - s * vkq;
                    v[q * n + k] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    (values, v)
}

fn frobenius(a: &[f64], n: usize) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt() / n as f64
}

/// Classical thermal alignment of the trapped rotor from the marginal
/// Boltzmann distribution: <cos²β> = ∫ u² e^{au²} du / ∫ e^{au²} du over
/// u = cosβ ∈ [-1, 1], a = V₀/k_BT.
pub fn classical_alignment(v0_over_kt: f64) -> f64 {
    let rule = gauss_legendre(400);
    let a = v0_over_kt;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        // e^{a(u² - 1)} keeps the weight bounded for deep traps.
        let f = (a * (u * u - 1.0)).exp();
        num += w * u * u * f;
        den += w * f;
    }
    num / den
}

/// Exact-rational Racah evaluation of small 3j symbols (j1+j2+j3 ≤ 30).
/// Intermediate arithmetic is exact in i128; the square root is taken once at
/// the end.
pub fn wigner3j_exact_small(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    assert!(j1 + j2 + j3 <= 30, "exact oracle limited to small j");
    if m1 + m2 + m3 != 0
        || m1.abs() > j1
        || m2.abs() > j2
        || m3.abs() > j3
        || j3 > j1 + j2
        || j3 < (j1 - j2).abs()
    {
        return 0.0;
    }
    let fact = |n: i64| -> i128 {
        assert!(n >= 0);
        (1..=n as i128).product::<i128>().max(1)
    };
    // Prefactor Δ·∏(j±m)! as an exact fraction.
    let pref_num = fact(j1 + j2 - j3)
        .checked_mul(fact(j1 - j2 + j3))
        .and_then(|x| x.checked_mul(fact(-j1 + j2 + j3)))
        .expect("overflow");
    let pref_den = fact(j1 + j2 + j3 + 1);
    let m_num = [
        fact(j1 + m1),
        fact(j1 - m1),
        fact(j2 + m2),
        fact(j2 - m2),
        fact(j3 + m3),
        fact(j3 - m3),
    ];

    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    if k_min > k_max {
        return 0.0;
    }
    // Σ (-1)^k / d_k as an exact fraction over the common denominator ∏ d_k is
    // too large; instead accumulate num/den with gcd reduction step by step.
    let gcd = |mut a: i128, mut b: i128| -> i128 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.max(1)
    };
    let mut sum_num: i128 = 0;
    let mut sum_den: i128 = 1;
    for k in k_min..=k_max {
        let dk = fact(k)
            .checked_mul(fact(j1 + j2 - j3 - k))
            .and_then(|x| x.checked_mul(fact(j1 - m1 - k)))
            .and_then(|x| x.checked_mul(fact(j2 + m2 - k)))
            .and_then(|x| x.checked_mul(fact(j3 - j2 + m1 + k)))
            .and_then(|x| x.checked_mul(fact(j3 - j1 - m2 + k)))
            .expect("overflow");
        let sgn: i128 = if k % 2 == 0 { 1 } else { -1 };
        // sum += sgn/dk
        let new_den_g = gcd(sum_den, dk);
        let scaled_a = sum_num.checked_mul(dk / new_den_g).expect("overflow");
        let scaled_b = sgn.checked_mul(sum_den / new_den_g).expect("overflow");
        sum_num = scaled_a.checked_add(scaled_b).expect("overflow");
        sum_den = (sum_den / new_den_g).checked_mul(dk).expect("overflow");
        let g = gcd(sum_num, sum_den);
        sum_num /= g;
        sum_den /= g;
    }
    if sum_num == 0 {
        return 0.0;
    }
    let sum = sum_num as f64 / sum_den as f64;
    let mut pref = pref_num as f64 / pref_den as f64;
    for f in m_num {
        pref *= f as f64;
    }
    let sign = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * sum.signum() * (pref * sum * sum).sqrt()
}

/// Dense rotor model on the full (j, m) basis with j ≤ j_max: used as the
/// oracle against the block/band production paths. All operators come from
/// quadrature, the eigensolve from Jacobi rotation.
pub struct DenseRotor {
    pub j_max: u32,
    pub dim: usize,
}

impl DenseRotor {
    pub fn new(j_max: u32) -> Self {
        Self {
            j_max,
            dim: ((j_max + 1) * (j_max + 1)) as usize,
        }
    }

    pub fn index(&self, j: u32, m: i32) -> usize {
        debug_assert!(m.unsigned_abs() <= j && j <= self.j_max);
        (j * j) as usize + (j as i32 + m) as usize
    }

    fn basis(&self) -> Vec<(u32, i32)> {
        let mut b = Vec::with_capacity(self.dim);
        for j in 0..=self.j_max {
            for m in -(j as i32)..=(j as i32) {
                b.push((j, m));
            }
        }
        b
    }

    /// Full Hamiltonian J² + v(θ, φ) scaled by B, from quadrature elements.
    pub fn hamiltonian<F>(&self, potential: F) -> Vec<f64>
    where
        F: Fn(f64, f64) -> f64 + Copy,
    {
        let basis = self.basis();
        let mut h = vec![0.0; self.dim * self.dim];
        for (a, &(ja, ma)) in basis.iter().enumerate() {
            h[a * self.dim + a] = (ja * (ja + 1)) as f64;
            for (b, &(jb, mb)) in basis.iter().enumerate().skip(a) {
                // Selection rules of the potentials used here keep this sparse.
                if (ma - mb).abs() > 2 || (ja as i32 - jb as i32).abs() > 2 {
                    continue;
                }
                let v = quad_element(ja, ma, jb, mb, potential);
                h[a * self.dim + b] += v;
                h[b * self.dim + a] += if a == b { 0.0 } else { v };
            }
        }
        h
    }

    /// Dense cos²β observable from quadrature.
    pub fn cos2_observable(&self) -> Vec<f64> {
        self.hamiltonian_free_offset(|theta, _| theta.cos() * theta.cos())
    }

    fn hamiltonian_free_offset<F>(&self, g: F) -> Vec<f64>
    where
        F: Fn(f64, f64) -> f64 + Copy,
    {
        let basis = self.basis();
        let mut c = vec![0.0; self.dim * self.dim];
        for (a, &(ja, ma)) in basis.iter().enumerate() {
            for (b, &(jb, mb)) in basis.iter().enumerate().skip(a) {
                if (ma - mb).abs() > 2 || (ja as i32 - jb as i32).abs() > 2 {
                    continue;
                }
                let v = quad_element(ja, ma, jb, mb, g);
                c[a * self.dim + b] = v;
                c[b * self.dim + a] = v;
            }
        }
        c
    }

    /// Dense initial density matrix from an eigendecomposed thermal state.
    pub fn density_from_state(&self, state: &ThermalRotorState) -> Vec<f64> {
        let mut rho = vec![0.0; self.dim * self.dim];
        for block in &state.blocks {
            let n = block.len();
            let m_vals: Vec<i32> = if block.m == 0 {
                vec![0]
            } else {
                vec![block.m as i32, -(block.m as i32)]
            };
            for &m in &m_vals {
                for k in 0..n {
                    let w = block.weights[k];
                    let vec_k = block.vector(k);
                    for (ia, &ca) in vec_k.iter().enumerate() {
                        let ja = block.j_of(ia);
                        let idx_a = self.index(ja, m);
                        for (ib, &cb) in vec_k.iter().enumerate() {
                            let jb = block.j_of(ib);
                            rho[idx_a * self.dim + self.index(jb, m)] += w * ca * cb;
                        }
                    }
                }
            }
        }
        rho
    }

    /// Alignment trace tr[ρ(t) C] of the dense model: exact evolution in the
    /// eigenbasis of the given Hamiltonian.
    pub fn alignment_trace(
        &self,
        h: &[f64],
        rho0: &[f64],
        c2: &[f64],
        taus: &[f64],
    ) -> Vec<f64> {
        let n = self.dim;
        let (values, vectors) = jacobi_eigh(h, n);
        // R = Sᵀ ρ S, Cm = Sᵀ C S with S columns = eigenvectors.
        let rot = |mat: &[f64]| -> Vec<f64> {
            let mut tmp = vec![0.0; n * n]; // mat · S
            for i in 0..n {
                for q in 0..n {
                    let col = &vectors[q * n..(q + 1) * n];
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += mat[i * n + k] * col[k];
                    }
                    tmp[i * n + q] = acc;
                }
            }
            let mut out = vec![0.0; n * n];
            for p in 0..n {
                let col = &vectors[p * n..(p + 1) * n];
                for q in 0..n {
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += col[k] * tmp[k * n + q];
                    }
                    out[p * n + q] = acc;
                }
            }
            out
        };
        let r = rot(rho0);
        let cm = rot(c2);
        taus.iter()
            .map(|&tau| {
                let theta = std::f64::consts::PI * tau;
                let mut acc = 0.0;
                for p in 0..n {
                    acc += r[p * n + p] * cm[p * n + p];
                    for q in (p + 1)..n {
                        let c = (theta * (values[p] - values[q])).cos();
                        acc += 2.0 * r[p * n + q] * cm[q * n + p] * c;
                    }
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plm_orthonormality() {
        let rule = gauss_legendre(40);
        for (l1, m1, l2, m2) in [(0u32, 0i32, 0u32, 0i32), (3, 1, 3, 1), (3, 1, 5, 1), (4, -2, 4, -2)] {
            let mut acc = 0.0;
            for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                acc += w * plm_norm(l1, m1, u) * plm_norm(l2, m2, u);
            }
            acc *= 2.0 * std::f64::consts::PI;
            let expect = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
            assert!((acc - expect).abs() < 1e-12, "({l1},{m1}) vs ({l2},{m2})");
        }
    }

    #[test]
    fn quadrature_identity_element() {
        assert!((quad_element(0, 0, 0, 0, |_, _| 1.0) - 1.0).abs() < 1e-12);
        assert!((quad_element(2, 1, 2, 1, |_, _| 1.0) - 1.0).abs() < 1e-12);
        assert!(quad_element(2, 1, 3, 1, |_, _| 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_small_3j() {
        let v = wigner3j_exact_small(1, 2, 1, 0, 0, 0);
        assert!((v - (2.0f64 / 15.0).sqrt()).abs() < 1e-14);
        let v = wigner3j_exact_small(2, 2, 2, 0, 0, 0);
        assert!((v + (2.0f64 / 35.0).sqrt()).abs() < 1e-14);
        let v = wigner3j_exact_small(7, 4, 5, 2, 1, -3);
        assert!((v + 0.11406580819528651971).abs() < 1e-14);
    }

    #[test]
    fn jacobi_solves_small_matrix() {
        // [[2, 1], [1, 2]]: eigenvalues 1 and 3.
        let (mut vals, _) = jacobi_eigh(&[2.0, 1.0, 1.0, 2.0], 2);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn classical_alignment_limits() {
        assert!((classical_alignment(0.0) - 1.0 / 3.0).abs() < 1e-12);
        // Deep trap: 1 - x - x²/2 + O(x³) with x = kT/V0 = 1/50.
        let a = classical_alignment(50.0);
        assert!((a - (1.0 - 0.02 - 0.0002)).abs() < 5e-5, "got {a}");
    }
}
