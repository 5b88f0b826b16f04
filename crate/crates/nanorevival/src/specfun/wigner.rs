//! Wigner 3j symbols for integer angular momenta.
//!
//! The families that appear in the alignment observable, (j' 2 j; m 0 -m) with
//! j' in {j, j±2}, are evaluated from closed-form expressions (rational
//! polynomials under a square root) which keep 12+ significant digits up to
//! j ~ 10^5. Everything else goes through the general Racah sum in the
//! log-factorial domain with compensated summation; that path is accurate at
//! small and moderate j and degrades gracefully from cancellation at large j.

use std::sync::OnceLock;

use crate::linalg::KahanSum;

/// Arguments of a Wigner 3j symbol with integer angular momenta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThreeJArgs {
    pub j1: u32,
    pub j2: u32,
    pub j3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl ThreeJArgs {
    pub fn new(j1: u32, j2: u32, j3: u32, m1: i32, m2: i32, m3: i32) -> Self {
        Self { j1, j2, j3, m1, m2, m3 }
    }
}

const LN_FACT_TABLE_LEN: usize = 1 << 16;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE_LEN);
        t.push(0.0);
        let mut acc = KahanSum::new();
        for n in 1..LN_FACT_TABLE_LEN {
            acc.add((n as f64).ln());
            t.push(acc.value());
        }
        t
    })
}

/// ln(n!) — table lookup below 2^16, Stirling series with Bernoulli
/// corrections above (full double precision in that regime).
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACT_TABLE_LEN {
        return ln_factorial_table()[n as usize];
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ln Gamma(x) for large x.
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 + inv2 * (-1.0 / 360.0 + inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

#[inline]
fn phase(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn triangle_ok(j1: u32, j2: u32, j3: u32) -> bool {
    j3 as i64 <= j1 as i64 + j2 as i64
        && j1 as i64 <= j2 as i64 + j3 as i64
        && j2 as i64 <= j3 as i64 + j1 as i64
}

/// (j 2 j; m 0 -m)
fn family_j2j_q0(j: i64, m: i64) -> f64 {
    let jf = j as f64;
    let mf = m as f64;
    let num = 2.0 * (3.0 * mf * mf - jf * (jf + 1.0));
    let den = ((2.0 * jf - 1.0)
        * (2.0 * jf)
        * (2.0 * jf + 1.0)
        * (2.0 * jf + 2.0)
        * (2.0 * jf + 3.0))
        .sqrt();
    phase(j - m) * num / den
}

/// (j+2 2 j; m 0 -m)
fn family_jp2_q0(j: i64, m: i64) -> f64 {
    let jf = j as f64;
    let mf = m as f64;
    let num = 6.0 * (jf + mf + 1.0) * (jf + mf + 2.0) * (jf - mf + 1.0) * (jf - mf + 2.0);
    let den = (2.0 * jf + 1.0)
        * (2.0 * jf + 2.0)
        * (2.0 * jf + 3.0)
        * (2.0 * jf + 4.0)
        * (2.0 * jf + 5.0);
    phase(j - m) * (num / den).sqrt()
}

/// (j 2 j; -(m+2) 2 m)
fn family_j2j_q2(j: i64, m: i64) -> f64 {
    let jf = j as f64;
    let mf = m as f64;
    let num = 6.0 * (jf - mf - 1.0) * (jf - mf) * (jf + mf + 1.0) * (jf + mf + 2.0);
    let den = (2.0 * jf - 1.0)
        * (2.0 * jf)
        * (2.0 * jf + 1.0)
        * (2.0 * jf + 2.0)
        * (2.0 * jf + 3.0);
    phase(j - m) * (num / den).sqrt()
}

/// General Racah single-sum evaluation in the log domain.
fn racah_general(args: ThreeJArgs) -> f64 {
    let ThreeJArgs { j1, j2, j3, m1, m2, m3 } = args;
    let (j1, j2, j3) = (j1 as i64, j2 as i64, j3 as i64);
    let (m1, m2, m3) = (m1 as i64, m2 as i64, m3 as i64);

    let lf = |n: i64| -> f64 {
        debug_assert!(n >= 0);
        ln_factorial(n as u64)
    };

    // 0.5 * ln of the factorial prefactor.
    let half_ln_pref = 0.5
        * (lf(j1 + j2 - j3) + lf(j1 - j2 + j3) + lf(-j1 + j2 + j3) - lf(j1 + j2 + j3 + 1)
            + lf(j1 + m1)
            + lf(j1 - m1)
            + lf(j2 + m2)
            + lf(j2 - m2)
            + lf(j3 + m3)
            + lf(j3 - m3));

    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    if k_min > k_max {
        return 0.0;
    }

    // Sum of signed exponentials, rescaled by the largest term.
    let mut log_terms = Vec::with_capacity((k_max - k_min + 1) as usize);
    for k in k_min..=k_max {
        let lt = lf(k)
            + lf(j1 + j2 - j3 - k)
            + lf(j1 - m1 - k)
            + lf(j2 + m2 - k)
            + lf(j3 - j2 + m1 + k)
            + lf(j3 - j1 - m2 + k);
        log_terms.push((k, half_ln_pref - lt));
    }
    let max_log = log_terms
        .iter()
        .map(|&(_, l)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = KahanSum::new();
    for &(k, l) in &log_terms {
        acc.add(phase(k) * (l - max_log).exp());
    }
    phase(j1 - j2 - m3) * acc.value() * max_log.exp()
}

/// Canonical argument order: j1 ≥ j2 ≥ j3 and (m1 > 0 or (m1 == 0, m2 ≥ 0)),
/// reached by column swaps and overall m negation, each contributing
/// (-1)^(j1+j2+j3). Guarantees that symmetry-related inputs evaluate through
/// the identical code path.
fn canonicalize(args: ThreeJArgs) -> (ThreeJArgs, f64) {
    let mut c = [
        (args.j1, args.m1),
        (args.j2, args.m2),
        (args.j3, args.m3),
    ];
    let js = (args.j1 + args.j2 + args.j3) as i64;
    let mut sign = 1.0;
    let mut flip = |s: &mut f64| {
        if js % 2 == 1 {
            *s = -*s;
        }
    };
    // Three-element sort by j, descending, tracking swap parity.
    if c[0].0 < c[1].0 {
        c.swap(0, 1);
        flip(&mut sign);
    }
    if c[1].0 < c[2].0 {
        c.swap(1, 2);
        flip(&mut sign);
    }
    if c[0].0 < c[1].0 {
        c.swap(0, 1);
        flip(&mut sign);
    }
    if c[0].1 < 0 || (c[0].1 == 0 && c[1].1 < 0) {
        for col in c.iter_mut() {
            col.1 = -col.1;
        }
        flip(&mut sign);
    }
    (
        ThreeJArgs::new(c[0].0, c[1].0, c[2].0, c[0].1, c[1].1, c[2].1),
        sign,
    )
}

/// Wigner 3j symbol. Selection-rule failures return 0, never an error.
pub fn wigner3j(args: ThreeJArgs) -> f64 {
    let ThreeJArgs { j1, j2, j3, m1, m2, m3 } = args;
    if m1.unsigned_abs() > j1 || m2.unsigned_abs() > j2 || m3.unsigned_abs() > j3 {
        return 0.0;
    }
    if m1 + m2 + m3 != 0 || !triangle_ok(j1, j2, j3) {
        return 0.0;
    }

    let (c, sign) = canonicalize(args);
    let ThreeJArgs { j1, j2, j3, m1, m2, m3 } = c;

    // (j j 0; m -m 0).
    if j3 == 0 {
        return sign * phase(j1 as i64 - m1 as i64) / ((2 * j1 + 1) as f64).sqrt();
    }

    // Families with a spin-2 column, dispatched after the column swap
    // (j1 j2 2; m1 m2 m3) -> (j1 2 j2; m1 m3 m2), which carries no sign here
    // because j1 + j2 + 2 + (j1 + j2) is even for j1 - j2 ∈ {0, 2}.
    if j3 == 2 {
        let (ja, jb) = (j1 as i64, j2 as i64);
        let (ma, mb) = (m1 as i64, m2 as i64);
        if m3 == 0 {
            if j1 == j2 {
                return sign * family_j2j_q0(ja, ma);
            }
            if j1 == j2 + 2 {
                return sign * family_jp2_q0(jb, ma);
            }
        }
        if j1 == j2 && m3 == 2 {
            // (j 2 j; -(m+2) 2 m) with m = m2.
            return sign * family_j2j_q2(ja, mb);
        }
        if j1 == j2 && m3 == -2 {
            return sign * family_j2j_q2(ja, -mb);
        }
    }

    sign * racah_general(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w3(j1: u32, j2: u32, j3: u32, m1: i32, m2: i32, m3: i32) -> f64 {
        wigner3j(ThreeJArgs::new(j1, j2, j3, m1, m2, m3))
    }

    #[test]
    fn small_exact_values() {
        assert!((w3(1, 2, 1, 0, 0, 0) - (2.0f64 / 15.0).sqrt()).abs() < 1e-14);
        assert!((w3(2, 2, 2, 0, 0, 0) + (2.0f64 / 35.0).sqrt()).abs() < 1e-14);
        assert_eq!(w3(2, 2, 0, 1, 0, -1), 0.0); // |m3| > j3
        assert_eq!(w3(5, 2, 9, 0, 0, 0), 0.0); // triangle violated
        assert_eq!(w3(2, 2, 2, 1, 0, 0), 0.0); // m1+m2+m3 != 0
    }

    #[test]
    fn general_path_against_exact_references() {
        // Values from exact rational evaluation (sympy.physics.wigner). The
        // log-gamma route loses digits to cancellation as j grows; 1e-8
        // relative is its honest accuracy at j ~ 50.
        let cases: [(u32, u32, u32, i32, i32, i32, f64); 5] = [
            (7, 4, 5, 2, 1, -3, -0.11406580819528651971),
            (9, 2, 9, -4, 2, 2, -0.12688211539626197672),
            (60, 50, 40, 12, -31, 19, -0.0071003317564617783770),
            (20, 2, 20, 13, 0, -13, -0.016189601084038538108),
            (20, 2, 18, -7, 0, 7, -0.085479031442176180924),
        ];
        for (j1, j2, j3, m1, m2, m3, expect) in cases {
            let got = w3(j1, j2, j3, m1, m2, m3);
            assert!(
                (got - expect).abs() < 1e-8 * expect.abs().max(1e-4),
                "({j1} {j2} {j3}; {m1} {m2} {m3}): {got} vs {expect}"
            );
        }
    }

    #[test]
    fn hot_family_large_j() {
        // Exact closed-form references evaluated in 50-digit arithmetic.
        let got = w3(100_000, 2, 100_000, 12_345, 0, -12_345);
        assert!((got - 1.066915645720178e-3).abs() < 1e-13 * got.abs());
        let got = w3(100_000, 2, 99_998, 50_000, 0, -50_000);
        assert!((got - 1.0269789394882168e-3).abs() < 1e-13 * got.abs());
        let got = w3(1000, 2, 998, 500, 0, -500);
        assert!((got - 0.010268940382857354325).abs() < 1e-12 * got.abs());
        let got = w3(200, 2, 200, 37, 0, -37);
        assert!((got - 0.022418099776233293820).abs() < 1e-12 * got.abs());
    }

    #[test]
    fn closed_forms_match_racah_sum_up_to_j_200() {
        for j in (2..=200u32).step_by(7) {
            for m in [0i32, 1, (j / 3) as i32, j as i32 - 1, j as i32] {
                if m.unsigned_abs() > j {
                    continue;
                }
                let fast = w3(j, 2, j, m, 0, -m);
                let slow = racah_general(ThreeJArgs::new(j, 2, j, m, 0, -m));
                assert!(
                    (fast - slow).abs() < 1e-10 * fast.abs().max(1e-8),
                    "diag family j={j}, m={m}: {fast} vs {slow}"
                );
                if m.unsigned_abs() <= j {
                    let fast = w3(j + 2, 2, j, m, 0, -m);
                    let slow = racah_general(ThreeJArgs::new(j + 2, 2, j, m, 0, -m));
                    assert!(
                        (fast - slow).abs() < 1e-10 * fast.abs().max(1e-8),
                        "offdiag family j={j}, m={m}: {fast} vs {slow}"
                    );
                }
                if m + 2 <= j as i32 {
                    let fast = w3(j, 2, j, -(m + 2), 2, m);
                    let slow = racah_general(ThreeJArgs::new(j, 2, j, -(m + 2), 2, m));
                    assert!(
                        (fast - slow).abs() < 1e-10 * fast.abs().max(1e-8),
                        "q2 family j={j}, m={m}: {fast} vs {slow}"
                    );
                }
            }
        }
    }

    #[test]
    fn ln_factorial_spans_table_boundary() {
        // Stirling branch continuous with the table.
        let a = ln_factorial(LN_FACT_TABLE_LEN as u64 - 1);
        let b = ln_factorial(LN_FACT_TABLE_LEN as u64);
        let step = (LN_FACT_TABLE_LEN as f64).ln();
        assert!((b - a - step).abs() < 1e-10);
        // ln(20!) exactly representable reference.
        assert!((ln_factorial(20) - 2.432902008176640000e18f64.ln()).abs() < 1e-12);
    }

    proptest! {
        /// Odd column permutations multiply by (-1)^(j1+j2+j3); even ones preserve.
        #[test]
        fn column_permutation_symmetry(
            j1 in 0u32..50, j2 in 0u32..50, dj in 0i64..50,
            m1s in 0.0f64..1.0, m2s in 0.0f64..1.0,
        ) {
            let lo = (j1 as i64 - j2 as i64).unsigned_abs() as i64;
            let hi = (j1 + j2) as i64;
            let j3 = (lo + (dj % (hi - lo + 1))) as u32;
            let m1 = ((m1s * (2.0 * j1 as f64 + 1.0)) as i64 - j1 as i64) as i32;
            let m2 = ((m2s * (2.0 * j2 as f64 + 1.0)) as i64 - j2 as i64) as i32;
            let m3 = -(m1 + m2);
            prop_assume!(m3.unsigned_abs() <= j3);

            let base = w3(j1, j2, j3, m1, m2, m3);
            let sgn = phase((j1 + j2 + j3) as i64);
            let odd = w3(j2, j1, j3, m2, m1, m3);
            let even = w3(j2, j3, j1, m2, m3, m1);
            let tol = 1e-7 * base.abs().max(1e-5);
            prop_assert!((odd - sgn * base).abs() < tol);
            prop_assert!((even - base).abs() < tol);
            // Time reversal: negate all m.
            let tr = w3(j1, j2, j3, -m1, -m2, -m3);
            prop_assert!((tr - sgn * base).abs() < tol);
        }

        /// Orthogonality: sum_{m1,m2} (2 j3 + 1) 3j(...)^2 = 1 for a valid triangle
        /// (small j, where the general path holds ~12 digits).
        #[test]
        fn orthogonality(j1 in 0u32..12, j2 in 0u32..12, dj in 0u32..25) {
            let lo = (j1 as i64 - j2 as i64).unsigned_abs() as u32;
            let hi = j1 + j2;
            let j3 = lo + dj % (hi - lo + 1);
            let mut total = KahanSum::new();
            for m1 in -(j1 as i32)..=(j1 as i32) {
                for m2 in -(j2 as i32)..=(j2 as i32) {
                    let m3 = -(m1 + m2);
                    if m3.unsigned_abs() > j3 {
                        continue;
                    }
                    let v = w3(j1, j2, j3, m1, m2, m3);
                    total.add((2.0 * j3 as f64 + 1.0) * v * v);
                }
            }
            prop_assert!((total.value() - 1.0).abs() < 1e-9);
        }
    }
}
