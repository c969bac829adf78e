//! CODATA 2018 constants.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;

/// Converts a frequency in MHz (cycles) to angular frequency in rad/s.
pub fn mhz_to_rad(mhz: f64) -> f64 {
    2.0 * PI * mhz * 1e6
}

/// Inverse of [`mhz_to_rad`].
pub fn rad_to_mhz(rad: f64) -> f64 {
    rad / (2.0 * PI * 1e6)
}
