//! Classical Fabry-Perot scattering of a dielectric slab at normal incidence.
//!
//! The slab is lossless and sits in vacuum, so both faces share the same pair
//! of Fresnel coefficients. Everything here depends on two numbers only: the
//! internal reflection coefficient `r` and the single-pass phase
//! `phi = omega0 * n * d / c`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::numerics::reduced_sin;

/// Physical description of the slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    pub length: f64,
    pub refractive_index: f64,
    pub light_speed: f64,
}

impl CavityGeometry {
    pub fn new(length: f64, refractive_index: f64, light_speed: f64) -> Result<Self> {
        require(length > 0.0 && length.is_finite(), "length", length, "must be positive and finite")?;
        require(
            refractive_index >= 1.0 && refractive_index.is_finite(),
            "refractive_index",
            refractive_index,
            "must be finite and at least 1",
        )?;
        require(
            light_speed > 0.0 && light_speed.is_finite(),
            "light_speed",
            light_speed,
            "must be positive and finite",
        )?;
        Ok(Self { length, refractive_index, light_speed })
    }

    /// Slab of index `n` in natural units: `c = 1` and `n d / c = 1`.
    pub fn natural(refractive_index: f64) -> Result<Self> {
        require(
            refractive_index >= 1.0 && refractive_index.is_finite(),
            "refractive_index",
            refractive_index,
            "must be finite and at least 1",
        )?;
        Self::new(1.0 / refractive_index, refractive_index, 1.0)
    }

    /// Same slab, `factor` times longer.
    pub fn scaled_length(&self, factor: f64) -> Result<Self> {
        Self::new(self.length * factor, self.refractive_index, self.light_speed)
    }
}

/// Anything with symmetric mirrors and a single-pass transit time.
pub trait Resonator {
    fn fresnel(&self) -> FresnelSet;

    /// One-way optical transit time `n d / c`.
    fn transit_time(&self) -> f64;

    /// Internal reflection coefficient `r`.
    fn reflectivity(&self) -> f64 {
        self.fresnel().r
    }

    /// Single-pass phase `omega0 * n d / c`.
    fn phase(&self, omega0: f64) -> f64 {
        omega0 * self.transit_time()
    }
}

impl Resonator for CavityGeometry {
    fn fresnel(&self) -> FresnelSet {
        FresnelSet::for_index(self.refractive_index)
    }

    fn transit_time(&self) -> f64 {
        self.refractive_index * self.length / self.light_speed
    }
}

/// A cavity specified directly by its mirror reflection coefficient. Unlike
/// [`CavityGeometry`] this also admits the lossless limit `r = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorCavity {
    pub reflectivity: f64,
    pub transit_time: f64,
}

impl MirrorCavity {
    pub fn new(reflectivity: f64, transit_time: f64) -> Result<Self> {
        require((0.0..=1.0).contains(&reflectivity), "reflectivity", reflectivity, "must lie in [0, 1]")?;
        require(
            transit_time > 0.0 && transit_time.is_finite(),
            "transit_time",
            transit_time,
            "must be positive and finite",
        )?;
        Ok(Self { reflectivity, transit_time })
    }
}

impl Resonator for MirrorCavity {
    fn fresnel(&self) -> FresnelSet {
        FresnelSet::from_reflectivity(self.reflectivity)
    }

    fn transit_time(&self) -> f64 {
        self.transit_time
    }

    fn reflectivity(&self) -> f64 {
        self.reflectivity
    }
}

impl<R: Resonator + ?Sized> Resonator for &R {
    fn fresnel(&self) -> FresnelSet {
        (**self).fresnel()
    }
    fn transit_time(&self) -> f64 {
        (**self).transit_time()
    }
    fn reflectivity(&self) -> f64 {
        (**self).reflectivity()
    }
}

/// Fresnel amplitude coefficients of one vacuum/dielectric interface.
///
/// `r`, `t` are for light hitting the interface from inside the dielectric,
/// `r_prime`, `t_prime` for light arriving from the vacuum side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FresnelSet {
    pub r: f64,
    pub t: f64,
    pub r_prime: f64,
    pub t_prime: f64,
}

impl FresnelSet {
    fn for_index(n: f64) -> Self {
        Self {
            r: (n - 1.0) / (n + 1.0),
            t: 2.0 * n / (n + 1.0),
            r_prime: (1.0 - n) / (1.0 + n),
            t_prime: 2.0 / (1.0 + n),
        }
    }

    /// Coefficients of the interface whose internal reflection is `r`
    /// (`n = (1 + r) / (1 - r)`); well defined up to and including `r = 1`.
    pub fn from_reflectivity(r: f64) -> Self {
        Self { r, t: 1.0 + r, r_prime: -r, t_prime: 1.0 - r }
    }

    /// `r^2 + t t'`, equal to one for a lossless interface.
    pub fn stokes_sum(&self) -> f64 {
        self.r * self.r + self.t * self.t_prime
    }
}

pub fn fresnel_coefficients(n: f64) -> Result<FresnelSet> {
    require(
        n >= 1.0 && n.is_finite(),
        "refractive_index",
        n,
        "must be finite and at least 1 (vacuum outside, dielectric inside)",
    )?;
    Ok(FresnelSet::for_index(n))
}

/// Complex reflection and transmission amplitudes of the whole slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringAmplitudes {
    pub r_cav: Complex64,
    pub t_cav: Complex64,
}

/// Reflection and transmission probabilities of the whole slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringRates {
    pub reflection: f64,
    pub transmission: f64,
    pub finesse: f64,
}

/// Coefficient of finesse `4 r^2 / (1 - r^2)^2`. Infinite at `r = 1`.
pub fn finesse(r: f64) -> f64 {
    let one_minus = 1.0 - r * r;
    4.0 * r * r / (one_minus * one_minus)
}

fn check_frequency(omega0: f64) -> Result<()> {
    require(omega0 >= 0.0 && omega0.is_finite(), "omega0", omega0, "must be finite and non-negative")
}

pub fn cavity_amplitudes<R: Resonator>(cavity: &R, omega0: f64) -> Result<ScatteringAmplitudes> {
    check_frequency(omega0)?;
    Ok(amplitudes_at_phase(cavity.reflectivity(), cavity.phase(omega0)))
}

/// Closed-form slab amplitudes for internal reflection `r` and phase `phi`.
pub fn amplitudes_at_phase(r: f64, phi: f64) -> ScatteringAmplitudes {
    let r2 = r * r;
    let once = Complex64::from_polar(1.0, phi);
    let twice = Complex64::from_polar(1.0, 2.0 * phi);
    let denom = Complex64::new(1.0, 0.0) - twice * r2;
    ScatteringAmplitudes { r_cav: (twice - 1.0) * r / denom, t_cav: once * (1.0 - r2) / denom }
}

/// Partial sums of the multiple-bounce series, keeping every pass
/// `m <= m_max`. Even passes exit through the entrance face, odd passes
/// through the far face.
pub fn truncated_bounce_sum<R: Resonator>(cavity: &R, omega0: f64, m_max: usize) -> Result<ScatteringAmplitudes> {
    check_frequency(omega0)?;
    require(m_max >= 1, "m_max", m_max as f64, "must be at least 1")?;

    let f = cavity.fresnel();
    let phi = cavity.phase(omega0);
    let step = Complex64::from_polar(1.0, phi);

    let mut r_cav = Complex64::new(f.r_prime, 0.0);
    let mut t_cav = Complex64::new(0.0, 0.0);
    // term for pass m: t' r^(m-1) e^(i m phi) t
    let mut term = step * (f.t_prime * f.t);
    for m in 1..=m_max {
        if m % 2 == 0 {
            r_cav += term;
        } else {
            t_cav += term;
        }
        term *= step * f.r;
    }
    Ok(ScatteringAmplitudes { r_cav, t_cav })
}

pub fn cavity_rates<R: Resonator>(cavity: &R, omega0: f64) -> Result<ScatteringRates> {
    check_frequency(omega0)?;
    Ok(rates_at_phase(cavity.reflectivity(), cavity.phase(omega0)))
}

pub fn rates_at_phase(r: f64, phi: f64) -> ScatteringRates {
    let f = finesse(r);
    let s = reduced_sin(phi);
    let fs2 = f * s * s;
    ScatteringRates { reflection: fs2 / (1.0 + fs2), transmission: 1.0 / (1.0 + fs2), finesse: f }
}

/// Intensity left in the undriven cavity after time `t`: `r^(2 c t / n d) I0`.
pub fn undriven_intensity<R: Resonator>(cavity: &R, t: f64, i0: f64) -> Result<f64> {
    require(t >= 0.0 && t.is_finite(), "t", t, "must be finite and non-negative")?;
    require(i0 >= 0.0 && i0.is_finite(), "i0", i0, "must be finite and non-negative")?;
    let exponent = 2.0 * t / cavity.transit_time();
    Ok(cavity.reflectivity().powf(exponent) * i0)
}
