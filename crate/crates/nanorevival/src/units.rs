//! Unit conversions at the library boundary. Internally everything runs in SI
//! or in the dimensionless rotor units (energies in B = ħ²/2I, time in units
//! of the revival time).

use crate::constants::ATOMIC_MASS;

/// Atomic mass units to kilograms.
pub fn amu_to_kg(amu: f64) -> f64 {
    amu * ATOMIC_MASS
}

/// Kilograms to atomic mass units.
pub fn kg_to_amu(kg: f64) -> f64 {
    kg / ATOMIC_MASS
}

/// Millibar to pascal.
pub fn mbar_to_pa(mbar: f64) -> f64 {
    mbar * 100.0
}

/// Nanometres to metres. Division by the exact power of ten keeps round
/// decimal inputs exactly representable (50 nm -> 5e-8 m bit-exact).
pub fn nm_to_m(nm: f64) -> f64 {
    nm / 1e9
}

/// Micrometres to metres.
pub fn um_to_m(um: f64) -> f64 {
    um / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn amu_round_trip(amu in 1.0f64..1e12) {
            let back = kg_to_amu(amu_to_kg(amu));
            prop_assert!((back - amu).abs() <= 1e-12 * amu);
        }
    }

    #[test]
    fn pressure_and_length() {
        assert_eq!(mbar_to_pa(5e-9), 5e-7);
        assert_eq!(nm_to_m(50.0), 5e-8);
        assert_eq!(um_to_m(30.0), 3e-5);
    }
}
