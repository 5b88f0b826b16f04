//! Physical constants, CODATA 2018 (Tiesinga et al., Rev. Mod. Phys. 93, 025010).
//!
//! SI-exact values are written as defined; measured values carry the full
//! published precision. All downstream code takes constants from here so a
//! constant-set change is a one-file diff.

use std::f64::consts::PI;

/// Identifier emitted into run manifests.
pub const CONSTANT_SET: &str = "CODATA-2018";

/// Planck constant h (J·s), exact by SI definition.
pub const H_PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant ħ = h/2π (J·s).
pub const HBAR: f64 = H_PLANCK / (2.0 * PI);

/// Boltzmann constant k_B (J/K), exact by SI definition.
pub const K_BOLTZMANN: f64 = 1.380_649e-23;

/// Speed of light in vacuum c (m/s), exact by SI definition.
pub const C_LIGHT: f64 = 2.997_924_58e8;

/// Vacuum electric permittivity ε₀ (F/m), CODATA 2018 measured value.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Atomic mass unit (kg), CODATA 2018 measured value.
pub const ATOMIC_MASS: f64 = 1.660_539_066_60e-27;

/// Electron mass (kg), CODATA 2018 measured value.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Standard gravitational acceleration used for drop kinematics (m/s²).
pub const G_ACCEL: f64 = 9.81;
