//! Free unitary evolution of the alignment signal, the analytic decoherence
//! envelope, and the classical shear baseline.
//!
//! Time is dimensionless: τ = t/T_rev. Free evolution multiplies the banded
//! density elements by exp(-iπτ[j(j+1) - j'(j'+1)]); for the |Δj| = 2 band the
//! phase difference is the even integer 4j+6, so alignment revivals at integer
//! τ are exact up to floating-point rounding of cos(π·integer).

use rayon::prelude::*;

use crate::linalg::{pairwise_sum, KahanSum};
use crate::specfun::{cos2_diag, cos2_off};
use crate::thermal::BandedDensity;

/// Alignment <cos²β> of the freely evolved state at time τ (units of T_rev).
///
/// Kahan accumulation inside each m chain, pairwise summation across m. The
/// imaginary part of the trace cancels pairwise between the (j, j+2) and
/// (j+2, j) terms of the real symmetric band, so only cosines appear.
pub fn unitary_alignment(band: &BandedDensity, tau: f64) -> f64 {
    let j_max = band.j_max;
    let per_m: Vec<f64> = (0..=j_max)
        .map(|m| {
            let deg = if m == 0 { 1.0 } else { 2.0 };
            let diag = &band.diag[m as usize];
            let off = &band.off[m as usize];
            let mut acc = KahanSum::new();
            for (i, &rho) in diag.iter().enumerate() {
                let j = m + i as u32;
                acc.add(rho * cos2_diag(j, m as i32));
            }
            for (i, &rho) in off.iter().enumerate() {
                let j = m + i as u32;
                let phase_int = (4 * j + 6) as f64;
                let c = (std::f64::consts::PI * (tau * phase_int)).cos();
                acc.add(2.0 * rho * cos2_off(j, m as i32) * c);
            }
            deg * acc.value()
        })
        .collect();
    pairwise_sum(&per_m)
}

/// The j-diagonal part of the alignment, Σ ρ[j,j,m] <jm|cos²β|jm>. At
/// half-integer τ every Δj = 2 coherence flips sign, so
/// A(n + 1/2) = 2 D - A(n).
pub fn diagonal_contribution(band: &BandedDensity) -> f64 {
    let per_m: Vec<f64> = (0..=band.j_max)
        .map(|m| {
            let deg = if m == 0 { 1.0 } else { 2.0 };
            let mut acc = KahanSum::new();
            for (i, &rho) in band.diag[m as usize].iter().enumerate() {
                acc.add(rho * cos2_diag(m + i as u32, m as i32));
            }
            deg * acc.value()
        })
        .collect();
    pairwise_sum(&per_m)
}

/// Initial alignment tr(ρ₀ cos²β) — the τ = 0 value of the unitary signal.
pub fn initial_alignment(band: &BandedDensity) -> f64 {
    unitary_alignment(band, 0.0)
}

/// Single-event decoherence model: A_dec = A_u e^{-Γt} + (1 - e^{-Γt})/3.
pub fn decohered_alignment(unitary_value: f64, gamma_hz: f64, t_s: f64) -> f64 {
    assert!(gamma_hz >= 0.0 && t_s >= 0.0);
    let env = (-gamma_hz * t_s).exp();
    unitary_value * env + (1.0 - env) / 3.0
}

/// Flat-space shearing approximation of the initial dispersion:
/// A(t) = A₀ e^{-κ²t²} + (1 - e^{-κ²t²})/2.
pub fn classical_shear_alignment(initial_alignment: f64, kappa_hz: f64, t_s: f64) -> f64 {
    assert!(t_s >= 0.0);
    let g = (-(kappa_hz * t_s) * (kappa_hz * t_s)).exp();
    initial_alignment * g + 0.5 * (1.0 - g)
}

/// Classical expectation after the initial shear: 1/3 + e^{-Γt}/6.
pub fn classical_baseline(gamma_hz: f64, t_s: f64) -> f64 {
    assert!(gamma_hz >= 0.0 && t_s >= 0.0);
    1.0 / 3.0 + (-gamma_hz * t_s).exp() / 6.0
}

/// Time grid specification in units of the revival time.
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// End of the trace, in revival times.
    pub tau_max: f64,
    /// Uniform base sampling (number of intervals).
    pub base_points: usize,
    /// Densely sample windows around integer and half-integer τ.
    pub refine_revivals: bool,
    /// Points per refinement window.
    pub refine_points: usize,
    /// κ·T_rev, sets the refinement window half-width 5/(κ·T_rev).
    pub kappa_trev: f64,
}

impl GridSpec {
    pub fn uniform(tau_max: f64, points: usize) -> Self {
        Self {
            tau_max,
            base_points: points,
            refine_revivals: false,
            refine_points: 0,
            kappa_trev: 0.0,
        }
    }
}

/// Deterministic monotone τ grid with optional revival-centered refinement.
pub fn build_tau_grid(spec: &GridSpec) -> Vec<f64> {
    assert!(spec.tau_max > 0.0 && spec.base_points >= 1);
    let mut taus: Vec<f64> = (0..=spec.base_points)
        .map(|i| spec.tau_max * i as f64 / spec.base_points as f64)
        .collect();
    if spec.refine_revivals && spec.kappa_trev > 0.0 && spec.refine_points >= 2 {
        let half_width = 5.0 / spec.kappa_trev;
        let mut center = 0.5;
        while center <= spec.tau_max + 1e-12 {
            for k in 0..=spec.refine_points {
                let frac = 2.0 * k as f64 / spec.refine_points as f64 - 1.0;
                let tau = center + frac * half_width;
                if (0.0..=spec.tau_max).contains(&tau) {
                    taus.push(tau);
                }
            }
            center += 0.5;
        }
    }
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    taus.dedup();
    taus
}

/// Alignment trace: the unitary, decohered, and classical channels plus the
/// decoherence envelope on a common grid.
#[derive(Debug, Clone)]
pub struct AlignmentTrace {
    pub tau: Vec<f64>,
    pub t_seconds: Vec<f64>,
    pub alignment_unitary: Vec<f64>,
    pub alignment_decohered: Vec<f64>,
    pub alignment_classical: Vec<f64>,
    pub envelope: Vec<f64>,
}

/// Physical rates entering a trace, all premultiplied by the revival time.
#[derive(Debug, Clone, Copy)]
pub struct TraceParams {
    /// Γ·T_rev (decoherence events per revival).
    pub gamma_trev: f64,
    /// κ·T_rev (shear rate per revival).
    pub kappa_trev: f64,
    /// T_rev in seconds, used only to fill the t_seconds column.
    pub t_rev_seconds: f64,
}

/// Evaluate all channels on the grid. Grid points are independent and are
/// evaluated in parallel; output order follows the input grid.
pub fn trace(band: &BandedDensity, taus: &[f64], params: &TraceParams) -> AlignmentTrace {
    let a0 = initial_alignment(band);
    let unitary: Vec<f64> = taus
        .par_iter()
        .map(|&tau| unitary_alignment(band, tau))
        .collect();
    let mut out = AlignmentTrace {
        tau: taus.to_vec(),
        t_seconds: taus.iter().map(|&t| t * params.t_rev_seconds).collect(),
        alignment_unitary: unitary,
        alignment_decohered: Vec::with_capacity(taus.len()),
        alignment_classical: Vec::with_capacity(taus.len()),
        envelope: Vec::with_capacity(taus.len()),
    };
    for (i, &tau) in taus.iter().enumerate() {
        let env = (-params.gamma_trev * tau).exp();
        let u = out.alignment_unitary[i];
        let g = (-(params.kappa_trev * tau) * (params.kappa_trev * tau)).exp();
        let shear = a0 * g + 0.5 * (1.0 - g);
        out.envelope.push(env);
        out.alignment_decohered.push(u * env + (1.0 - env) / 3.0);
        out.alignment_classical.push(shear * env + (1.0 - env) / 3.0);
    }
    out
}

impl AlignmentTrace {
    /// Range bounds and the pointwise decoherence identity.
    pub fn validate(&self) -> crate::error::Result<()> {
        let n = self.tau.len();
        for i in 0..n {
            for v in [
                self.alignment_unitary[i],
                self.alignment_decohered[i],
                self.alignment_classical[i],
            ] {
                if !(-1e-9..=1.0 + 1e-9).contains(&v) {
                    return Err(crate::error::Error::InvalidParameter(format!(
                        "alignment {v} out of [0, 1] at tau = {}",
                        self.tau[i]
                    )));
                }
            }
            let env = self.envelope[i];
            let expect = self.alignment_unitary[i] * env + (1.0 - env) / 3.0;
            if (self.alignment_decohered[i] - expect).abs() > 1e-12 {
                return Err(crate::error::Error::InvalidParameter(format!(
                    "decoherence identity violated at tau = {}",
                    self.tau[i]
                )));
            }
        }
        Ok(())
    }
}
