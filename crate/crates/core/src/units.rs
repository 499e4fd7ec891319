//! Conversion of learnt solar-location coordinates from model units to
//! Galactic units: bar pattern speed and bar-Sun angle. Both maps are
//! strictly monotone, so credible intervals convert endpoint-wise.

use crate::error::{Error, Result};

/// Physical constants anchoring the model units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitConstants {
    /// Radial location of the Sun, kiloparsec.
    pub r_sun_kpc: f64,
    /// Circular speed scale, km/s.
    pub v0_kms: f64,
}

impl Default for UnitConstants {
    fn default() -> Self {
        Self {
            r_sun_kpc: 8.0,
            v0_kms: 220.0,
        }
    }
}

/// Bar pattern speed in km/s/kpc from the radial coordinate in model
/// units: one model unit of length is `r_sun_kpc / s1`, and the speed is
/// `v0` per model unit.
pub fn omega_bar(s1_model: f64, c: &UnitConstants) -> Result<f64> {
    if !(s1_model > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radial coordinate must be positive, got {s1_model}"
        )));
    }
    Ok(c.v0_kms * s1_model / c.r_sun_kpc)
}

/// Bar-Sun angle in degrees from the angular coordinate in radians.
pub fn bar_angle_deg(s2_model_rad: f64) -> f64 {
    s2_model_rad.to_degrees()
}
