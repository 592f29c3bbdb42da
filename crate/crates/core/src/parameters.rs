//! Traveling-wave model constants derived from the cavity geometry.
//!
//! The decay rate `kappa` is fixed by requiring the undriven photon number to
//! decay like the classical intensity, and the coupling `J` by requiring the
//! stationary left/right emission split to reproduce the classical
//! reflection/transmission probabilities. Rates come out in units of
//! `1 / transit_time`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classical::Resonator;
use crate::error::{require, Error, Result};
use crate::numerics::reduced_sin;

/// Parameter bundle of the traveling-wave master equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravelingWaveParams {
    pub kappa: f64,
    /// Signed left/right conversion rate `J`.
    pub coupling: f64,
    /// Rabi frequency of the drive inside the cavity.
    pub rabi: f64,
    /// Laser detuning from the nearest resonance (`omega_m - omega0`).
    pub detuning: f64,
}

impl TravelingWaveParams {
    pub fn new(kappa: f64, coupling: f64, rabi: f64) -> Result<Self> {
        Self::with_detuning(kappa, coupling, rabi, 0.0)
    }

    pub fn with_detuning(kappa: f64, coupling: f64, rabi: f64, detuning: f64) -> Result<Self> {
        require(kappa >= 0.0 && kappa.is_finite(), "kappa", kappa, "must be finite and non-negative")?;
        require(coupling.is_finite(), "coupling", coupling, "must be finite")?;
        require(rabi >= 0.0 && rabi.is_finite(), "rabi", rabi, "must be finite and non-negative")?;
        require(detuning.is_finite(), "detuning", detuning, "must be finite")?;
        Ok(Self { kappa, coupling, rabi, detuning })
    }

    /// Exact `kappa` and `J` for a cavity driven at `omega0`.
    pub fn from_resonator<R: Resonator>(cavity: &R, omega0: f64, rabi: f64) -> Result<Self> {
        let kappa = kappa_exact(cavity)?;
        let coupling = coupling_exact(cavity, omega0)?;
        let detuning = if omega0 > 0.0 { nearest_detuning(cavity, omega0)?.0 } else { 0.0 };
        Self::with_detuning(kappa, coupling, rabi, detuning)
    }

    /// Near-resonant parameters with the coupling fixed at `J = -2 Delta`.
    pub fn near_resonant(kappa: f64, rabi: f64, detuning: f64) -> Result<Self> {
        Self::with_detuning(kappa, coupling_near_resonant(detuning), rabi, detuning)
    }

    /// Largest rate in the bundle, used to pick integrator steps.
    pub fn max_rate(&self) -> f64 {
        self.kappa.max(self.coupling.abs()).max(self.rabi).max(self.detuning.abs())
    }
}

/// Cavity resonance `omega_m = m pi c / (n d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceLadder {
    pub mode_index: usize,
    pub omega: f64,
}

impl ResonanceLadder {
    pub fn new<R: Resonator>(cavity: &R, mode_index: usize) -> Result<Self> {
        Ok(Self { mode_index, omega: resonance_frequency(cavity, mode_index)? })
    }
}

fn check_reflectivity(r: f64) -> Result<()> {
    if r == 0.0 {
        return Err(Error::NoCavity);
    }
    require(r > 0.0 && r <= 1.0, "reflectivity", r, "must lie in (0, 1]")
}

/// `kappa = -(2 c / n d) ln r`.
pub fn kappa_exact<R: Resonator>(cavity: &R) -> Result<f64> {
    let r = cavity.reflectivity();
    check_reflectivity(r)?;
    if r == 1.0 {
        return Ok(0.0);
    }
    Ok(-2.0 * r.ln() / cavity.transit_time())
}

/// `r ln r / (1 - r^2)`, with its `r -> 1` limit of `-1/2`.
fn interference_factor(r: f64) -> f64 {
    if r == 1.0 {
        -0.5
    } else {
        r * (r - 1.0).ln_1p() / ((1.0 - r) * (1.0 + r))
    }
}

/// `J(omega0) = (4 c / n d) (r ln r / (1 - r^2)) sin(omega0 n d / c)`.
///
/// Exactly zero on every cavity resonance. The overall sign is a convention;
/// only `J^2` is observable.
pub fn coupling_exact<R: Resonator>(cavity: &R, omega0: f64) -> Result<f64> {
    require(omega0 >= 0.0 && omega0.is_finite(), "omega0", omega0, "must be finite and non-negative")?;
    let r = cavity.reflectivity();
    check_reflectivity(r)?;
    let s = reduced_sin(cavity.phase(omega0));
    Ok(4.0 / cavity.transit_time() * interference_factor(r) * s)
}

/// High-reflectivity forms `kappa = (c/nd)(1 - r^2)` and
/// `J = -(2 r c / n d) sin(omega0 n d / c)`.
pub fn params_high_reflectivity<R: Resonator>(cavity: &R, omega0: f64) -> Result<(f64, f64)> {
    require(omega0 >= 0.0 && omega0.is_finite(), "omega0", omega0, "must be finite and non-negative")?;
    let r = cavity.reflectivity();
    let tau = cavity.transit_time();
    let kappa = (1.0 - r * r) / tau;
    let coupling = -2.0 * r / tau * reduced_sin(cavity.phase(omega0));
    Ok((kappa, coupling))
}

pub fn resonance_frequency<R: Resonator>(cavity: &R, m: usize) -> Result<f64> {
    require(m >= 1, "m", m as f64, "mode index must be at least 1")?;
    Ok(m as f64 * PI / cavity.transit_time())
}

/// Detuning `omega_m - omega0` from the closest resonance, and its index.
/// A drive exactly half-way between two resonances goes to the lower one.
pub fn nearest_detuning<R: Resonator>(cavity: &R, omega0: f64) -> Result<(f64, usize)> {
    require(omega0 > 0.0 && omega0.is_finite(), "omega0", omega0, "must be positive and finite")?;
    let x = cavity.phase(omega0) / PI;
    let lower = (x.floor() as usize).max(1);
    let upper = lower + 1;

    let omega_lower = resonance_frequency(cavity, lower)?;
    let omega_upper = resonance_frequency(cavity, upper)?;
    let d_lower = (omega_lower - omega0).abs();
    let d_upper = (omega_upper - omega0).abs();

    let tie = (d_lower - d_upper).abs() <= 1e-12 * omega0.max(d_lower);
    if tie || d_lower < d_upper {
        Ok((omega_lower - omega0, lower))
    } else {
        Ok((omega_upper - omega0, upper))
    }
}

/// Near-resonant coupling rule `J = -2 Delta`.
pub fn coupling_near_resonant(detuning: f64) -> f64 {
    -2.0 * detuning
}
