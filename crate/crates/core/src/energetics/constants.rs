//! CODATA constants and GaAs defaults.

pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const HBAR: f64 = 1.054_571_817e-34;

pub const GAAS_MASS_RATIO: f64 = 0.067;
pub const GAAS_EPS_R: f64 = 12.9;
pub const GAAS_HBAR_OMEGA0_MEV: f64 = 3.0;
pub const GAAS_ETA: f64 = 1.86;
