//! Environmental decoherence rates: gas-collision rate from the mean particle
//! flux onto the rotor surface, and the total event rate.

use serde::{Deserialize, Serialize};

use crate::constants::K_BOLTZMANN;
use crate::error::{Error, Result};
use crate::rotor::RotorSpec;
use crate::units::{amu_to_kg, mbar_to_pa};

/// Residual-gas environment and thermal-emission rate. The emission rate is an
/// input: its microphysics (internal temperature, spectral absorption) is not
/// modelled here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    /// Gas pressure (Pa).
    pub gas_pressure_pa: f64,
    /// Gas particle mass (kg).
    pub gas_mass_kg: f64,
    /// Gas temperature (K).
    pub gas_temperature_k: f64,
    /// Thermal photon emission rate Γ_emi (1/s).
    pub emission_rate_hz: f64,
}

/// Default gas assumption reproducing the quoted collision timescales:
/// molecular nitrogen at room temperature.
pub const DEFAULT_GAS_MASS_AMU: f64 = 28.0;
pub const DEFAULT_GAS_TEMPERATURE_K: f64 = 300.0;

impl EnvironmentSpec {
    pub fn new(
        gas_pressure_pa: f64,
        gas_mass_kg: f64,
        gas_temperature_k: f64,
        emission_rate_hz: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("gas pressure", gas_pressure_pa),
            ("gas mass", gas_mass_kg),
            ("gas temperature", gas_temperature_k),
            ("emission rate", emission_rate_hz),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(Self {
            gas_pressure_pa,
            gas_mass_kg,
            gas_temperature_k,
            emission_rate_hz,
        })
    }

    /// Pressure in mbar, gas mass in amu.
    pub fn from_mbar_amu(
        pressure_mbar: f64,
        gas_mass_amu: f64,
        gas_temperature_k: f64,
        emission_rate_hz: f64,
    ) -> Result<Self> {
        Self::new(
            mbar_to_pa(pressure_mbar),
            amu_to_kg(gas_mass_amu),
            gas_temperature_k,
            emission_rate_hz,
        )
    }

    /// N₂ at 300 K with zero emission rate.
    pub fn nitrogen_at_mbar(pressure_mbar: f64) -> Result<Self> {
        Self::from_mbar_amu(
            pressure_mbar,
            DEFAULT_GAS_MASS_AMU,
            DEFAULT_GAS_TEMPERATURE_K,
            0.0,
        )
    }
}

/// Gas scattering rate onto a cylinder of length l and effective diameter
/// d_eff: Γ_gas = π p d_eff l (1 + d_eff/2l) / sqrt(2π m_g k_B T_g).
pub fn gas_rate(spec: &RotorSpec, env: &EnvironmentSpec) -> Result<f64> {
    if env.gas_pressure_pa == 0.0 {
        return Ok(0.0);
    }
    if env.gas_mass_kg <= 0.0 || env.gas_temperature_k <= 0.0 {
        return Err(Error::InvalidParameter(
            "gas mass and temperature must be > 0 at nonzero pressure".into(),
        ));
    }
    let d = spec.effective_diameter_m;
    let l = spec.length_m;
    let num = std::f64::consts::PI * env.gas_pressure_pa * d * l * (1.0 + d / (2.0 * l));
    let den = (2.0 * std::f64::consts::PI * env.gas_mass_kg * K_BOLTZMANN * env.gas_temperature_k)
        .sqrt();
    Ok(num / den)
}

/// Total decoherence event rate Γ = Γ_gas + Γ_emi.
pub fn total_rate(env: &EnvironmentSpec, gas_rate_hz: f64) -> f64 {
    gas_rate_hz + env.emission_rate_hz
}
