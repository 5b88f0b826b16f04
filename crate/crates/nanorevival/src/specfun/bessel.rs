//! Scaled modified Bessel functions of the first kind in the log domain:
//! ln[I_n(z) e^{-z}] for integer order n ≥ 0 and z ≥ 0.
//!
//! Three regimes, switched on the constants below:
//!   - power series (log domain, positive terms) for z ≤ `SERIES_MAX_Z`;
//!   - Hankel large-argument expansion when z ≥ `HANKEL_MIN_Z` and the order
//!     correction parameter 4n²/(8z) ≤ `HANKEL_MAX_MU8Z`;
//!   - Miller backward recurrence with the e^z normalization sum otherwise.

use crate::specfun::wigner::ln_factorial;

/// Largest argument handled by the power series.
pub const SERIES_MAX_Z: f64 = 30.0;
/// Smallest argument for the Hankel asymptotic branch.
pub const HANKEL_MIN_Z: f64 = 1.0e4;
/// Largest (mu = 4n²)/(8z) admitted into the Hankel branch.
pub const HANKEL_MAX_MU8Z: f64 = 1.0e-3;

/// ln[I_n(z) e^{-z}]. Returns -inf for n ≥ 1 at z = 0.
pub fn log_bessel_i_scaled(n: u32, z: f64) -> f64 {
    assert!(z >= 0.0 && z.is_finite(), "bessel argument must be finite and >= 0");
    if z == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if z <= SERIES_MAX_Z {
        return series_log_scaled(n, z);
    }
    let mu_over_8z = 4.0 * (n as f64) * (n as f64) / (8.0 * z);
    if z >= HANKEL_MIN_Z && mu_over_8z <= HANKEL_MAX_MU8Z {
        return hankel_log_scaled(n, z);
    }
    miller_log_scaled(n, z)
}

/// I_n(z) = (z/2)^n / n! * sum_k t_k, t_0 = 1, t_{k+1} = t_k (z/2)^2 / ((k+1)(n+k+1)).
fn series_log_scaled(n: u32, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let nf = n as f64;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..400 {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (nf + kf + 1.0));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    nf * (0.5 * z).ln() - ln_factorial(n as u64) + sum.ln() - z
}

/// I_n(z) e^{-z} ~ (2 pi z)^{-1/2} [1 - (mu-1)/(8z) + (mu-1)(mu-9)/(2!(8z)^2) - ...],
/// mu = 4 n².
fn hankel_log_scaled(n: u32, z: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut s = 1.0f64;
    let mut term = 1.0f64;
    for k in 1..=6u32 {
        let kf = k as f64;
        let factor = mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0);
        term *= -factor / (kf * 8.0 * z);
        s += term;
    }
    -0.5 * (2.0 * std::f64::consts::PI * z).ln() + s.ln()
}

/// Backward (Miller) recurrence I_{k-1} = I_{k+1} + (2k/z) I_k, normalized by
/// e^z = I_0(z) + 2 sum_{k>=1} I_k(z). Tracks a power-of-R rescale count so the
/// logarithm stays finite even when I_n(z)e^{-z} underflows f64.
fn miller_log_scaled(n: u32, z: f64) -> f64 {
    const RESCALE: f64 = 1e250;
    const LN_RESCALE: f64 = 575.6462732485114; // ln(1e250)

    // Start high enough that the minimal-solution admixture at n is < 1e-18:
    // the contaminating solution decays like exp(-(M² - n²)/2z) downward.
    let start = ((n as f64) * (n as f64) + 84.0 * z).sqrt().ceil() as u64 + 12;
    let mut fk1 = 0.0f64; // f_{k+1}
    let mut fk = f64::MIN_POSITIVE * 1e40; // f_k at k = start
    let mut norm = 0.0f64; // accumulates f_0 + 2 sum_{k>=1} f_k
    let mut rescales_total: i64 = 0;
    let mut captured = (0.0f64, 0i64);

    let mut k = start;
    loop {
        if k == n as u64 {
            captured = (fk, rescales_total);
        }
        if k == 0 {
            norm += fk;
            break;
        }
        norm += 2.0 * fk;
        let fk_m1 = fk1 + (2.0 * k as f64 / z) * fk;
        fk1 = fk;
        fk = fk_m1;
        if fk > RESCALE {
            fk /= RESCALE;
            fk1 /= RESCALE;
            norm /= RESCALE;
            rescales_total += 1;
        }
        k -= 1;
    }

    let (fn_stored, rescales_at_capture) = captured;
    if fn_stored == 0.0 {
        return f64::NEG_INFINITY;
    }
    fn_stored.ln() + (rescales_at_capture - rescales_total) as f64 * LN_RESCALE - norm.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// References computed with 60-digit arithmetic (mpmath besseli).
    const REFERENCE: [(u32, f64, f64); 14] = [
        (0, 0.5, -0.4384502808145187),
        (0, 20.0, -2.4103895717557257),
        (0, 50.0, -2.8724244981281954),
        (1, 0.3, -2.1858909998885494),
        (1, 50.0, -2.8825263834128735),
        (5, 30.0, -3.0381137507538075),
        (17, 250.0, -4.2581039201645035),
        (100, 2500.0, -6.8310448432892292),
        (1000, 10.0, -4312.665291340331),
        (1000, 1.0e6, -8.326693895520239),
        (3, 1.0e8, -10.129278948930856),
        (40, 40.0, -21.622712612884661),
        (100_000, 10_000.0, -209330.21670824515),
        (250, 1000.0, -35.478071892639136),
    ];

    #[test]
    fn matches_high_precision_references() {
        for &(n, z, expect) in REFERENCE.iter() {
            let got = log_bessel_i_scaled(n, z);
            let tol = 1e-10 * expect.abs().max(1.0);
            assert!(
                (got - expect).abs() < tol,
                "n={n}, z={z}: got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(log_bessel_i_scaled(0, 0.0), 0.0);
        assert_eq!(log_bessel_i_scaled(1, 0.0), f64::NEG_INFINITY);
        assert_eq!(log_bessel_i_scaled(7, 0.0), f64::NEG_INFINITY);
    }

    /// f64 series summation oracle, independent of the scaled log-domain path.
    fn series_oracle(n: u32, z: f64) -> f64 {
        let q = 0.25 * z * z;
        let mut term = (0.5 * z).powi(n as i32)
            / (1..=n as u64).map(|k| k as f64).product::<f64>();
        let mut sum = term;
        for k in 0..2000u64 {
            let kf = k as f64;
            term *= q / ((kf + 1.0) * (n as f64 + kf + 1.0));
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum.ln() - z
    }

    #[test]
    fn miller_branch_matches_series_oracle() {
        // Arguments above SERIES_MAX_Z but small enough that the plain f64
        // series does not overflow.
        for &(n, z) in &[(0u32, 31.0), (0, 50.0), (1, 50.0), (5, 100.0), (17, 250.0), (64, 120.0)] {
            let got = log_bessel_i_scaled(n, z);
            let expect = series_oracle(n, z);
            assert!(
                (got - expect).abs() < 1e-11 * expect.abs().max(1.0),
                "n={n}, z={z}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn branches_agree_at_switchovers() {
        // Series vs Miller just across SERIES_MAX_Z.
        for n in [0u32, 1, 3, 10] {
            let below = series_log_scaled(n, SERIES_MAX_Z);
            let above = miller_log_scaled(n, SERIES_MAX_Z);
            assert!((below - above).abs() < 1e-11 * below.abs().max(1.0), "n={n}");
        }
        // Hankel vs Miller inside the Hankel domain.
        for &(n, z) in &[(0u32, 2.0e4), (2, 1.0e5), (5, 1.0e6)] {
            let h = hankel_log_scaled(n, z);
            let m = miller_log_scaled(n, z);
            assert!((h - m).abs() < 1e-11 * h.abs().max(1.0), "n={n}, z={z}");
        }
    }

    #[test]
    fn monotone_in_order() {
        // I_n(z) decreases with n at fixed z.
        for z in [0.7, 8.0, 75.0, 1.0e4] {
            let mut prev = log_bessel_i_scaled(0, z);
            for n in 1..20 {
                let cur = log_bessel_i_scaled(n, z);
                assert!(cur < prev, "n={n}, z={z}");
                prev = cur;
            }
        }
    }
}
