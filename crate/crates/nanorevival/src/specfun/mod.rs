//! Special functions: Wigner 3j symbols, matrix elements of cos²β and
//! sin²β·cos²α, and scaled modified Bessel functions.

mod bessel;
mod elements;
pub(crate) mod wigner;

pub use bessel::{log_bessel_i_scaled, HANKEL_MAX_MU8Z, HANKEL_MIN_Z, SERIES_MAX_Z};
pub use elements::{cos2_diag, cos2_element, cos2_off, sin2cos2_element};
pub use wigner::{ln_factorial, wigner3j, ThreeJArgs};
