//! Particle and trap descriptions plus all closed-form derived quantities:
//! moment of inertia, revival time, trap depth, thermal mean occupation,
//! release kinematics and the classical shear rate.

use serde::{Deserialize, Serialize};

use crate::constants::{C_LIGHT, EPSILON_0, G_ACCEL, HBAR, K_BOLTZMANN};
use crate::error::{Error, Result};
use crate::units::{amu_to_kg, nm_to_m, um_to_m};

/// Geometry, mass and (optionally) polarizability of a linear rotor.
/// The thin-rod model I = M l²/12 is used throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotorSpec {
    /// Total mass (kg).
    pub mass_kg: f64,
    /// Rod length (m).
    pub length_m: f64,
    /// Effective diameter d_eff seen by gas scattering (m).
    pub effective_diameter_m: f64,
    /// Polarizability anisotropy Δα = α_par - α_perp (C·m²/V). Only required
    /// when the trap depth is derived from beam parameters.
    pub polarizability_anisotropy: Option<f64>,
}

impl RotorSpec {
    pub fn new(
        mass_kg: f64,
        length_m: f64,
        effective_diameter_m: f64,
        polarizability_anisotropy: Option<f64>,
    ) -> Result<Self> {
        if !(mass_kg > 0.0) || !mass_kg.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be > 0, got {mass_kg}")));
        }
        if !(length_m > 0.0) || !length_m.is_finite() {
            return Err(Error::InvalidParameter(format!("length must be > 0, got {length_m}")));
        }
        if !(effective_diameter_m >= 0.0) || !effective_diameter_m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "effective diameter must be >= 0, got {effective_diameter_m}"
            )));
        }
        Ok(Self {
            mass_kg,
            length_m,
            effective_diameter_m,
            polarizability_anisotropy,
        })
    }

    /// Convenience constructor in amu / nm.
    pub fn from_amu_nm(mass_amu: f64, length_nm: f64, deff_nm: f64) -> Result<Self> {
        Self::new(amu_to_kg(mass_amu), nm_to_m(length_nm), nm_to_m(deff_nm), None)
    }
}

/// Optical trap parameters for the orientational potential V(β) = -V₀ cos²β.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    /// Beam power (W).
    pub power_w: f64,
    /// Standing-wave waist (m).
    pub waist_m: f64,
    /// Directly supplied potential depth (J); supersedes the P/w² formula.
    pub depth_override_j: Option<f64>,
}

impl TrapSpec {
    pub fn new(power_w: f64, waist_m: f64, depth_override_j: Option<f64>) -> Result<Self> {
        if !(power_w >= 0.0) || !power_w.is_finite() {
            return Err(Error::InvalidParameter(format!("power must be >= 0, got {power_w}")));
        }
        if !(waist_m > 0.0) || !waist_m.is_finite() {
            return Err(Error::InvalidParameter(format!("waist must be > 0, got {waist_m}")));
        }
        if let Some(v0) = depth_override_j {
            if !(v0 >= 0.0) || !v0.is_finite() {
                return Err(Error::InvalidParameter(format!("depth override must be >= 0, got {v0}")));
            }
        }
        Ok(Self { power_w, waist_m, depth_override_j })
    }

    /// A trap specified by its depth alone.
    pub fn from_depth(depth_j: f64) -> Result<Self> {
        Self::new(0.0, 1e-6, Some(depth_j))
    }
}

/// Moment of inertia I = M l²/12 (kg·m²).
pub fn moment_of_inertia(spec: &RotorSpec) -> f64 {
    spec.mass_kg * spec.length_m * spec.length_m / 12.0
}

/// Rotational energy scale B = ħ²/2I (J).
pub fn rotational_constant(spec: &RotorSpec) -> f64 {
    HBAR * HBAR / (2.0 * moment_of_inertia(spec))
}

/// Revival time T_rev = 2πI/ħ (s).
pub fn revival_time(spec: &RotorSpec) -> f64 {
    2.0 * std::f64::consts::PI * moment_of_inertia(spec) / HBAR
}

/// Trap depth V₀ = 4 Δα P / (π c ε₀ w²), or the override when present.
pub fn trap_depth(spec: &RotorSpec, trap: &TrapSpec) -> Result<f64> {
    if let Some(v0) = trap.depth_override_j {
        return Ok(v0);
    }
    let da = spec.polarizability_anisotropy.ok_or(Error::MissingPolarizability)?;
    Ok(4.0 * da * trap.power_w / (std::f64::consts::PI * C_LIGHT * EPSILON_0 * trap.waist_m * trap.waist_m))
}

/// Thermal mean total angular momentum <j>₀ = sqrt(π I k_B T / 2ħ²).
pub fn mean_j(spec: &RotorSpec, temperature_k: f64) -> Result<f64> {
    if !(temperature_k >= 0.0) || !temperature_k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "temperature must be >= 0, got {temperature_k}"
        )));
    }
    Ok((std::f64::consts::PI * moment_of_inertia(spec) * K_BOLTZMANN * temperature_k
        / (2.0 * HBAR * HBAR))
        .sqrt())
}

/// Free-fall drop distance and velocity after time t.
pub fn drop_kinematics(t_s: f64) -> (f64, f64) {
    assert!(t_s >= 0.0, "drop time must be >= 0");
    (0.5 * G_ACCEL * t_s * t_s, G_ACCEL * t_s)
}

/// Classical shear rate κ = sqrt(2 k_B T / I) (1/s).
pub fn shear_rate(spec: &RotorSpec, temperature_k: f64) -> Result<f64> {
    if !(temperature_k >= 0.0) || !temperature_k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "temperature must be >= 0, got {temperature_k}"
        )));
    }
    Ok((2.0 * K_BOLTZMANN * temperature_k / moment_of_inertia(spec)).sqrt())
}

/// A named particle preset with its default trap and temperature.
#[derive(Debug, Clone, Serialize)]
pub struct PresetEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub rotor: RotorSpec,
    pub trap: TrapSpec,
    pub default_temperature_k: f64,
}

/// Built-in particle presets.
///
/// CNT: double-walled carbon nanotube, d_eff = 2d with d = 1.5 nm.
/// SNR: silicon nanorod, d_eff = 2d with d = 5 nm.
/// TMV: tobacco mosaic virus (macroscopicity estimates only; no Δα).
pub fn preset_registry() -> Vec<PresetEntry> {
    let trap = TrapSpec::new(5.0, um_to_m(30.0), None).expect("static trap");
    vec![
        PresetEntry {
            name: "CNT",
            description: "double-walled carbon nanotube, 50 nm x 1.5 nm",
            rotor: RotorSpec::from_amu_nm(1.9e5, 50.0, 3.0).expect("static preset"),
            trap: trap.clone(),
            default_temperature_k: 1e-4,
        },
        PresetEntry {
            name: "SNR",
            description: "silicon nanorod, 50 nm x 5 nm",
            rotor: RotorSpec::from_amu_nm(1.4e6, 50.0, 10.0).expect("static preset"),
            trap: trap.clone(),
            default_temperature_k: 1e-4,
        },
        PresetEntry {
            name: "TMV",
            description: "tobacco mosaic virus, 300 nm x 20 nm",
            rotor: RotorSpec::from_amu_nm(4.0e7, 300.0, 40.0).expect("static preset"),
            trap,
            default_temperature_k: 1e-4,
        },
    ]
}

/// Look up a preset by case-insensitive name.
pub fn preset(name: &str) -> Result<PresetEntry> {
    preset_registry()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::InvalidParameter(format!("unknown preset '{name}'")))
}
