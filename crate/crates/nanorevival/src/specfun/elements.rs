//! Angular matrix elements of the alignment observable cos²β and of the
//! torque potential direction factor sin²β·cos²α in the |jm> basis.
//!
//! Closed forms are used throughout; they are algebraically equivalent to the
//! Wigner-3j expressions and keep full precision at j ~ 10^5 where a log-gamma
//! evaluation would lose digits. The test suites check them against the
//! general Racah-sum path and against spherical quadrature.

/// <jm|cos²β|jm>.
#[inline]
pub fn cos2_diag(j: u32, m: i32) -> f64 {
    let jf = j as f64;
    let mf = m as f64;
    // (2j-1) = -1 at j = 0 is harmless: the numerator vanishes there.
    1.0 / 3.0 + (2.0 / 3.0) * (jf * (jf + 1.0) - 3.0 * mf * mf)
        / ((2.0 * jf + 3.0) * (2.0 * jf - 1.0))
}

/// <j+2, m|cos²β|j, m>.
#[inline]
pub fn cos2_off(j: u32, m: i32) -> f64 {
    let jf = j as f64;
    let mf = m as f64;
    let p = ((jf + 1.0) * (jf + 1.0) - mf * mf) * ((jf + 2.0) * (jf + 2.0) - mf * mf);
    p.sqrt() / ((2.0 * jf + 3.0) * ((2.0 * jf + 1.0) * (2.0 * jf + 5.0)).sqrt())
}

/// <jm|cos²β|j'm>: zero unless |j - j'| ∈ {0, 2} and |m| ≤ min(j, j').
pub fn cos2_element(j: u32, j_prime: u32, m: i32) -> f64 {
    if m.unsigned_abs() > j.min(j_prime) {
        return 0.0;
    }
    match j as i64 - j_prime as i64 {
        0 => cos2_diag(j, m),
        2 => cos2_off(j_prime, m),
        -2 => cos2_off(j, m),
        _ => 0.0,
    }
}

/// <j, m+2|sin²β e^{2iα}|j, m> (real).
#[inline]
fn sin2_e2ia_raise(j: u32, m: i32) -> f64 {
    let jf = j as f64;
    let mf = m as f64;
    let p = (jf - mf - 1.0) * (jf - mf) * (jf + mf + 1.0) * (jf + mf + 2.0);
    -2.0 * p.sqrt() / ((2.0 * jf - 1.0) * (2.0 * jf + 3.0))
}

/// <jm|sin²β cos²α|jm'>: zero unless m' ∈ {m, m±2}.
///
/// Built from sin²β cos²α = (1 - cos²β)/2 + (sin²β cos 2α)/2.
pub fn sin2cos2_element(j: u32, m: i32, m_prime: i32) -> f64 {
    if m.unsigned_abs() > j || m_prime.unsigned_abs() > j {
        return 0.0;
    }
    match m_prime - m {
        0 => 0.5 * (1.0 - cos2_diag(j, m)),
        2 => 0.25 * sin2_e2ia_raise(j, m),
        -2 => 0.25 * sin2_e2ia_raise(j, m_prime),
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::wigner::{wigner3j, ThreeJArgs};

    #[test]
    fn cos2_reference_values() {
        assert!((cos2_element(0, 0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((cos2_element(1, 1, 0) - 0.6).abs() < 1e-15);
        assert!((cos2_element(1, 1, 1) - 0.2).abs() < 1e-15);
        assert!((cos2_element(0, 2, 0) - 2.0 / (3.0 * 5.0f64.sqrt())).abs() < 1e-15);
        assert_eq!(cos2_element(5, 9, 0), 0.0);
        assert_eq!(cos2_element(4, 5, 0), 0.0);
        assert_eq!(cos2_element(3, 3, 4), 0.0);
        // <42|cos2|42> = 31/77, <42|cos2|62> = 4 sqrt(546)/429 (exact integrals).
        assert!((cos2_element(4, 4, 2) - 31.0 / 77.0).abs() < 1e-15);
        assert!((cos2_element(4, 6, 2) - 4.0 * 546.0f64.sqrt() / 429.0).abs() < 1e-15);
    }

    #[test]
    fn cos2_matches_wigner_3j_expression() {
        // Eq. form: delta_mm'/3 [ (-1)^m 2 sqrt((2j'+1)(2j+1)) (j' 2 j;000)(j' 2 j;m 0 -m) + delta_jj' ]
        for j in 0u32..40 {
            for dj in [0i64, 2] {
                let jp = j + dj as u32;
                for m in -(j as i32)..=(j as i32) {
                    let w0 = wigner3j(ThreeJArgs::new(jp, 2, j, 0, 0, 0));
                    let wm = wigner3j(ThreeJArgs::new(jp, 2, j, m, 0, -m));
                    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let kron = if jp == j { 1.0 } else { 0.0 };
                    let expect = (sign
                        * 2.0
                        * (((2 * jp + 1) * (2 * j + 1)) as f64).sqrt()
                        * w0
                        * wm
                        + kron)
                        / 3.0;
                    let got = cos2_element(j, jp, m);
                    assert!(
                        (got - expect).abs() < 1e-12,
                        "j={j}, j'={jp}, m={m}: {got} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn cos2_fixed_m_matrix_is_symmetric() {
        for j in 0u32..20 {
            for m in -(j as i32)..=(j as i32) {
                assert_eq!(cos2_element(j, j + 2, m), cos2_element(j + 2, j, m));
            }
        }
    }

    #[test]
    fn sin2cos2_reference_values() {
        // Exact spherical integrals.
        assert!((sin2cos2_element(0, 0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((sin2cos2_element(1, 0, 0) - 0.2).abs() < 1e-15);
        assert!((sin2cos2_element(3, 1, -1) + 2.0 / 15.0).abs() < 1e-15);
        assert!((sin2cos2_element(3, 1, 1) - 4.0 / 15.0).abs() < 1e-15);
        assert!((sin2cos2_element(4, 2, 0) + 3.0 * 10.0f64.sqrt() / 77.0).abs() < 1e-15);
        assert!((sin2cos2_element(5, -3, -1) + 2.0 * 42.0f64.sqrt() / 117.0).abs() < 1e-15);
        assert_eq!(sin2cos2_element(2, 1, 0), 0.0);
        assert_eq!(sin2cos2_element(2, 2, 3), 0.0);
    }

    #[test]
    fn sin2cos2_is_symmetric() {
        for j in 0u32..25 {
            for m in -(j as i32)..=(j as i32) {
                for mp in -(j as i32)..=(j as i32) {
                    let a = sin2cos2_element(j, m, mp);
                    let b = sin2cos2_element(j, mp, m);
                    assert!((a - b).abs() < 1e-15, "j={j} m={m} m'={mp}");
                }
            }
        }
    }

    #[test]
    fn within_shell_trace_identities() {
        // sum_m <jm|cos2|jm> = (2j+1)/3 exactly (isotropy of the shell), and the
        // same for sin²β cos²α by symmetry.
        for j in 0u32..60 {
            let tc: f64 = (-(j as i32)..=(j as i32)).map(|m| cos2_diag(j, m)).sum();
            let ts: f64 = (-(j as i32)..=(j as i32))
                .map(|m| sin2cos2_element(j, m, m))
                .sum();
            let expect = (2 * j + 1) as f64 / 3.0;
            assert!((tc - expect).abs() < 1e-11 * expect.max(1.0));
            assert!((ts - expect).abs() < 1e-11 * expect.max(1.0));
        }
    }
}
