//! Physical constants (CODATA 2018) and the intensity ↔ Rabi-frequency bridge.
//!
//! Rabi frequencies are angular (rad/s) and follow `Ω = μ·E/ħ` with the field
//! amplitude taken from the cycle-averaged intensity `I = ε₀·c·E²/2`.

use crate::error::{EitError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Vacuum permittivity, F/m.
    pub epsilon0: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c_light: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    epsilon0: 8.854_187_812_8e-12,
    hbar: 1.054_571_817e-34,
    c_light: 2.997_924_58e8,
};

pub const EPSILON0: f64 = CODATA.epsilon0;
pub const HBAR: f64 = CODATA.hbar;
pub const C_LIGHT: f64 = CODATA.c_light;

/// Angular Rabi frequency (rad/s) for a field of intensity `intensity` (W/m²)
/// driving a transition with dipole moment `mu` (C·m).
pub fn rabi_from_intensity(intensity: f64, mu: f64) -> Result<f64> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(EitError::Domain(format!(
            "intensity must be finite and non-negative, got {intensity}"
        )));
    }
    if !(mu > 0.0) {
        return Err(EitError::Domain(format!(
            "dipole moment must be positive, got {mu}"
        )));
    }
    let field = (2.0 * intensity / (EPSILON0 * C_LIGHT)).sqrt();
    Ok(mu * field / HBAR)
}

/// Intensity (W/m²) that produces angular Rabi frequency `omega` on a
/// transition with dipole `mu`.
pub fn intensity_from_rabi(omega: f64, mu: f64) -> Result<f64> {
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(EitError::Domain(format!(
            "Rabi frequency must be finite and non-negative, got {omega}"
        )));
    }
    if mu == 0.0 || !mu.is_finite() {
        return Err(EitError::Domain("dipole moment must be nonzero".into()));
    }
    let field = HBAR * omega / mu;
    Ok(0.5 * EPSILON0 * C_LIGHT * field * field)
}

/// Boundary conversions. Every CLI/config quantity passes through one of these.
pub mod units {
    /// 1 mW/cm² = 10 W/m².
    pub fn mw_per_cm2_to_si(v: f64) -> f64 {
        v * 10.0
    }
    pub fn si_to_mw_per_cm2(v: f64) -> f64 {
        v / 10.0
    }
    pub fn um_to_m(v: f64) -> f64 {
        v * 1e-6
    }
    pub fn m_to_um(v: f64) -> f64 {
        v * 1e6
    }
    pub fn nm_to_m(v: f64) -> f64 {
        v * 1e-9
    }
    pub fn per_cm3_to_si(v: f64) -> f64 {
        v * 1e6
    }
}
