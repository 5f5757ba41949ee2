//! SI boundary: physical constants and the conversion between SI molecule
//! parameters and the natural units used internally.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * PI);
pub const EPSILON0: f64 = 8.854_187_812_8e-12;
pub const DEBYE: f64 = 3.335_64e-30;
pub const AMU: f64 = 1.660_54e-27;

/// Conversion factors from natural units (`B = d = ħ = 1`) to SI for one molecule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitScale {
    /// `r_B = (d²/4πε₀B)^{1/3}` in metres.
    pub length_m: f64,
    /// `B` in joules.
    pub energy_j: f64,
    /// `ħ/B` in seconds.
    pub time_s: f64,
    /// Molecule mass in units of `ħ²/(B r_B²)`.
    pub mass: f64,
}

impl UnitScale {
    /// From a dipole in Debye, a rotational constant `B/h` in Hz and a mass in amu.
    pub fn from_si(dipole_debye: f64, b_hz: f64, mass_amu: f64) -> Self {
        let d = dipole_debye * DEBYE;
        let b = PLANCK * b_hz;
        let m = mass_amu * AMU;
        let d2 = d * d / (4.0 * PI * EPSILON0);
        let length_m = (d2 / b).cbrt();
        UnitScale {
            length_m,
            energy_j: b,
            time_s: HBAR / b,
            mass: m * length_m * length_m * b / (HBAR * HBAR),
        }
    }

    /// `κ = (d⁴m³B/ħ⁶)^{1/2}`, equal to the dimensionless mass to the power 3/2.
    pub fn kappa(&self) -> f64 {
        self.mass.powf(1.5)
    }

    /// Natural angular frequency → SI angular frequency (rad/s).
    pub fn angular_frequency(&self, w: f64) -> f64 {
        w / self.time_s
    }

    /// SI angular frequency (rad/s) → natural units.
    pub fn angular_frequency_to_natural(&self, w_si: f64) -> f64 {
        w_si * self.time_s
    }

    pub fn length(&self, l: f64) -> f64 {
        l * self.length_m
    }

    pub fn energy(&self, e: f64) -> f64 {
        e * self.energy_j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sro_scales() {
        let u = UnitScale::from_si(8.9, 10e9, 104.0);
        assert!(
            (u.kappa() / 1.26e6 - 1.0).abs() < 0.03,
            "kappa {}",
            u.kappa()
        );
        assert!(
            (u.length_m / 11e-9 - 1.0).abs() < 0.05,
            "r_B {}",
            u.length_m
        );
        assert!((u.mass - u.kappa().powf(2.0 / 3.0)).abs() < 1e-9 * u.mass);
        let w = u.angular_frequency_to_natural(2.0 * PI * 150e3);
        assert!((u.angular_frequency(w) / (2.0 * PI * 150e3) - 1.0).abs() < 1e-14);
    }
}
