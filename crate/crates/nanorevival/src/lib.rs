//! Orientational quantum dynamics of levitated nanoscale linear rotors:
//! thermal state preparation in the |jm> basis, free-evolution alignment
//! traces with quantum revivals, environmental decoherence, macroscopicity
//! bounds, and torque-sensing response.
//!
//! The numerical core is dimensionless — energies in units of B = ħ²/2I and
//! times in units of the revival time T_rev = 2πI/ħ, so that free evolution
//! reduces to integer phases exp(-iπτ[j(j+1) - j'(j'+1)]) and revivals are
//! exact by construction. SI conversions happen at the module boundaries.

pub mod constants;
pub mod decoherence;
pub mod error;
pub mod evolve;
pub mod linalg;
pub mod macroscopicity;
pub mod quad;
pub mod rotor;
pub mod specfun;
pub mod thermal;
pub mod torque;
pub mod units;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use error::{Error, Result};
