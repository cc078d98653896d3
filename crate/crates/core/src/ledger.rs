//! Photon energy bookkeeping: internal (spin) and translational halves of hν,
//! momentum hν/c, and the dispersion relation ω = kc.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{DisclinationModel, WaveParams};

pub const PLANCK_SI: f64 = 6.62607015e-34;
pub const LIGHT_SPEED_SI: f64 = 2.99792458e8;
const DISPERSION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// `h = c = 1`.
    Geometric,
    Si,
}

impl UnitSystem {
    pub fn planck(self) -> f64 {
        match self {
            UnitSystem::Geometric => 1.0,
            UnitSystem::Si => PLANCK_SI,
        }
    }

    pub fn light_speed(self) -> f64 {
        match self {
            UnitSystem::Geometric => 1.0,
            UnitSystem::Si => LIGHT_SPEED_SI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonLedger {
    pub units: UnitSystem,
    pub nu: f64,
    /// `1 / nu`; infinite for the degenerate `nu = 0` ledger.
    pub tau: f64,
    pub k: f64,
    pub omega: f64,
    pub h: f64,
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySplit {
    pub internal: f64,
    pub translational: f64,
    pub total: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionCheck {
    pub on_shell: bool,
    pub relative_error: f64,
}

impl PhotonLedger {
    /// Ledger with an explicit wavenumber, which need not be on shell.
    pub fn new(nu: f64, k: f64, units: UnitSystem) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("frequency {nu} must be finite and non-negative")));
        }
        if !k.is_finite() {
            return Err(Error::InvalidParameter(format!("wavenumber {k} must be finite")));
        }
        Ok(PhotonLedger {
            units,
            nu,
            tau: 1.0 / nu,
            k,
            omega: 2.0 * PI * nu,
            h: units.planck(),
            c: units.light_speed(),
        })
    }

    /// On-shell ledger, `k = 2πν / c`.
    pub fn from_frequency(nu: f64, units: UnitSystem) -> Result<Self> {
        Self::new(nu, 2.0 * PI * nu / units.light_speed(), units)
    }

    /// `k = 2π/λ`, `ν = c/λ`.
    pub fn from_wavelength(lambda: f64, units: UnitSystem) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("wavelength {lambda} must be positive")));
        }
        Self::new(units.light_speed() / lambda, 2.0 * PI / lambda, units)
    }

    /// `E_i = hν/2`.
    pub fn spin_energy(&self) -> f64 {
        self.h * self.nu / 2.0
    }

    /// `(E_i, E_l, E)` with `E = hν` and `E_l = E - E_i`.
    pub fn total_energy(&self) -> EnergySplit {
        let total = self.h * self.nu;
        let internal = total / 2.0;
        EnergySplit {
            internal,
            translational: total - internal,
            total,
        }
    }

    /// `hν / c`.
    pub fn momentum(&self) -> f64 {
        self.total_energy().total / self.c
    }

    pub fn dispersion_check(&self) -> DispersionCheck {
        let gap = (self.omega - self.k * self.c).abs();
        let relative_error = if self.omega == 0.0 {
            if gap == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            gap / self.omega
        };
        DispersionCheck {
            on_shell: gap <= DISPERSION_TOL * self.omega,
            relative_error,
        }
    }

    /// The disclination carried by this photon, with unit amplitudes.
    pub fn disclination(&self) -> Result<DisclinationModel> {
        let params = WaveParams::new(self.k, self.omega, self.c, 1.0, num_complex::Complex64::new(1.0, 0.0))?;
        Ok(DisclinationModel::new(params))
    }
}
