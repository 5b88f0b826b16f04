//! Macroscopicity bound of the revival experiment: the geometry factor θ(x)
//! of the planar-rotor classicalization rate, its maximum θ_m, the planar
//! alignment decay under a classicalizing modification, and the lower bound μ
//! the observation of the n-th revival places on the modification timescale.

use crate::constants::{ELECTRON_MASS, HBAR};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::rotor::{revival_time, RotorSpec};

/// sinc(y) = sin(y)/y with the removable singularity handled by its series.
#[inline]
pub fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

/// Default radial node count per panel for θ(x).
pub const THETA_RADIAL_NODES: usize = 80;

/// Radial integration panels in u; the Gaussian weight leaves nothing beyond.
const THETA_PANELS: [(f64, f64); 4] = [(0.0, 2.0), (2.0, 4.0), (4.0, 7.0), (7.0, 12.0)];

/// Angle node count for θ(x): max(64, 8·x), rounded up.
pub fn theta_angle_nodes(x: f64) -> usize {
    64usize.max((8.0 * x).ceil() as usize)
}

/// θ(x) with explicit node counts (used by the convergence studies).
///
/// The double angle average of the squared sinc difference reduces exactly,
/// via the Fourier expansion of g(γ) = sinc(u x cos γ / 2), to twice the
/// variance of g over a single angle:
///   <[g(α-φ/2) - g(α+φ/2)]²>_{α,φ} = 2(<g²>_γ - <g>²_γ).
/// The radial factor u e^{-u²/2} (·) is integrated by composite Gauss-Legendre
/// panels in u: the variance decays only as 1/(ux) at large x, which a
/// weight-function rule in s = u²/2 resolves poorly, while the u-space
/// integrand stays analytic. The periodic trapezoid rule on γ is spectrally
/// accurate for these band-limited integrands.
pub fn theta_with_nodes(x: f64, radial_nodes: usize, angle_nodes: usize) -> f64 {
    assert!(x >= 0.0, "theta argument must be >= 0");
    if x == 0.0 {
        return 0.0;
    }
    let rule = gauss_legendre(radial_nodes);
    let n_ang = angle_nodes.max(8);
    let inv_n = 1.0 / n_ang as f64;
    let cos_table: Vec<f64> = (0..n_ang)
        .map(|k| (2.0 * std::f64::consts::PI * (k as f64 + 0.5) * inv_n).cos())
        .collect();

    let mut total = 0.0;
    for (a, b) in THETA_PANELS {
        for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
            let u = 0.5 * (b - a) * z + 0.5 * (a + b);
            let wu = 0.5 * (b - a) * w * u * (-0.5 * u * u).exp();
            let half_ux = 0.5 * u * x;
            let mut mean = 0.0;
            let mut mean_sq = 0.0;
            for &c in &cos_table {
                let g = sinc(half_ux * c);
                mean += g;
                mean_sq += g * g;
            }
            mean *= inv_n;
            mean_sq *= inv_n;
            total += wu * (mean_sq - mean * mean);
        }
    }
    total
}

/// Geometry factor θ(x) of the planar-rotor classicalization rate, with
/// x = ℓσ_q/ħ. Absolute accuracy better than 1e-4 across x ∈ [0, 10³].
pub fn theta(x: f64) -> f64 {
    theta_with_nodes(x, THETA_RADIAL_NODES, theta_angle_nodes(x))
}

/// Location and value of the maximum of θ(x): log-grid scan over
/// [1e-2, 1e2] refined by golden-section search.
pub fn theta_max() -> Result<(f64, f64)> {
    const SCAN_POINTS: usize = 81;
    let (lo, hi) = (1e-2f64, 1e2f64);
    let ratio = (hi / lo).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut best = (lo, theta(lo));
    let mut best_idx = 0usize;
    let mut xs = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        let x = lo * ratio.powi(i as i32);
        xs.push(x);
        let v = theta(x);
        if v > best.1 {
            best = (x, v);
            best_idx = i;
        }
    }
    if best_idx == 0 || best_idx == SCAN_POINTS - 1 {
        return Err(Error::OptimizationFailure(
            "theta maximum at scan boundary".into(),
        ));
    }

    // Golden-section refinement on the bracketing interval.
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (xs[best_idx - 1], xs[best_idx + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = theta(c);
    let mut fd = theta(d);
    for _ in 0..100 {
        if (b - a) < 1e-6 * b {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = theta(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = theta(d);
        }
    }
    let x_star = 0.5 * (a + b);
    Ok((x_star, theta(x_star)))
}

/// Inputs of the macroscopicity evaluation.
#[derive(Debug, Clone)]
pub struct MacroInputs {
    pub mass_kg: f64,
    pub length_m: f64,
    /// Index of the observed revival.
    pub revival_index: u32,
    /// Observed-to-expected visibility ratio f ∈ (0, 1).
    pub visibility_ratio: f64,
    pub revival_time_s: f64,
    /// Momentum-kick width σ_q (kg·m/s) for θ evaluation; optional.
    pub sigma_q: Option<f64>,
    /// Modification timescale τ (s); required by the forward decay model.
    pub tau_modification_s: Option<f64>,
}

impl MacroInputs {
    pub fn from_rotor(spec: &RotorSpec, revival_index: u32, visibility_ratio: f64) -> Self {
        Self {
            mass_kg: spec.mass_kg,
            length_m: spec.length_m,
            revival_index,
            visibility_ratio,
            revival_time_s: revival_time(spec),
            sigma_q: None,
            tau_modification_s: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.revival_index < 1 {
            return Err(Error::InvalidParameter("revival index must be >= 1".into()));
        }
        if !(self.visibility_ratio > 0.0 && self.visibility_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "visibility ratio must lie strictly inside (0, 1), got {}",
                self.visibility_ratio
            )));
        }
        Ok(())
    }
}

/// Planar-rotor alignment at the n-th revival under a classicalizing
/// modification of timescale τ and kick width σ_q:
/// 1/2 + (1/2) exp[-n (T_rev/τ) θ(ℓσ_q/ħ) (M/m_e)²].
pub fn planar_alignment_decay(inputs: &MacroInputs) -> Result<f64> {
    let tau = inputs.tau_modification_s.ok_or_else(|| {
        Error::InvalidParameter("planar decay requires the modification timescale".into())
    })?;
    let sigma_q = inputs.sigma_q.ok_or_else(|| {
        Error::InvalidParameter("planar decay requires the kick width sigma_q".into())
    })?;
    if !(tau > 0.0) || !(sigma_q >= 0.0) {
        return Err(Error::InvalidParameter("tau > 0 and sigma_q >= 0 required".into()));
    }
    let mass_ratio = inputs.mass_kg / ELECTRON_MASS;
    let exponent = inputs.revival_index as f64 * (inputs.revival_time_s / tau)
        * theta(inputs.length_m * sigma_q / HBAR)
        * mass_ratio
        * mass_ratio;
    Ok(0.5 + 0.5 * (-exponent).exp())
}

/// Modification timescale excluded by observing visibility ratio f at the
/// n-th revival (the solution of the planar decay model at its maximum θ_m).
pub fn excluded_timescale(inputs: &MacroInputs, theta_m: f64) -> Result<f64> {
    inputs.validate()?;
    let mass_ratio = inputs.mass_kg / ELECTRON_MASS;
    Ok(
        inputs.revival_index as f64 * theta_m * mass_ratio * mass_ratio * inputs.revival_time_s
            / inputs.visibility_ratio.ln().abs(),
    )
}

/// Macroscopicity lower bound μ = log₁₀[n θ_m (M/m_e)² (T_rev/1 s)/|ln f|].
pub fn mu_bound(inputs: &MacroInputs) -> Result<f64> {
    inputs.validate()?;
    let (_, theta_m) = theta_max()?;
    Ok(excluded_timescale(inputs, theta_m)?.log10())
}
