//! Executable cross-checks between the classical slab, the traveling-wave
//! model and the single standing-wave model.
//!
//! Every check returns a [`ConsistencyReport`]. Grids are deterministic;
//! the only randomised check takes an explicit seed.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classical::{cavity_rates, undriven_intensity, CavityGeometry, MirrorCavity, Resonator};
use crate::error::{require, Result};
use crate::numerics::{linspace, StepperConfig};
use crate::parameters::{coupling_exact, kappa_exact, nearest_detuning, TravelingWaveParams};
use crate::rates::{evolve_single_mode_fixed, evolve_traveling_fixed, RateState5, SingleModeState};

pub const FLUX_TOL: f64 = 1e-12;
pub const RATIO_TOL: f64 = 1e-12;
pub const NEAR_RESONANT_TOL: f64 = 1e-9;
/// Relative tolerance on `kappa * tau` and `sup|J| * tau` staying constant.
pub const SCALING_TOL: f64 = 1e-12;
pub const FREE_FIELD_BOUND: f64 = 1e-6;

/// Outcome of one check over its grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub name: String,
    pub grid: String,
    pub max_dev: f64,
    /// `None` for informational reports that carry no pass/fail gate.
    pub tol: Option<f64>,
    pub pass: bool,
    /// Coordinates of the grid point with the largest deviation.
    pub worst: Vec<(String, f64)>,
}

impl ConsistencyReport {
    fn new(name: &str, grid: String, tol: Option<f64>, worst: Worst) -> Self {
        let max_dev = worst.dev;
        Self { name: name.to_owned(), grid, max_dev, tol, pass: tol.is_none_or(|t| max_dev <= t), worst: worst.at }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report is always serialisable")
    }
}

impl fmt::Display for ConsistencyReport {
    /// One line: verdict, name, deviation, tolerance.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.tol, self.pass) {
            (None, _) => "INFO",
            (_, true) => "PASS",
            (_, false) => "FAIL",
        };
        write!(f, "{verdict} {} max_dev={:.3e}", self.name, self.max_dev)?;
        if let Some(t) = self.tol {
            write!(f, " tol={t:.1e}")?;
        }
        Ok(())
    }
}

/// Running maximum with the coordinates where it occurred. NaN always wins,
/// so a broken evaluation can never pass.
#[derive(Debug, Default)]
struct Worst {
    dev: f64,
    at: Vec<(String, f64)>,
}

impl Worst {
    fn offer(&mut self, dev: f64, at: &[(&str, f64)]) {
        if dev > self.dev || dev.is_nan() && !self.dev.is_nan() || self.at.is_empty() {
            self.dev = dev;
            self.at = at.iter().map(|&(k, v)| (k.to_owned(), v)).collect();
        }
    }

    fn merge(&mut self, other: Worst) {
        if !other.at.is_empty() {
            let at: Vec<(&str, f64)> = other.at.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            self.offer(other.dev, &at);
        }
    }
}

fn require_leaky(cavity: &impl Resonator) -> Result<()> {
    let r = cavity.reflectivity();
    require(r > 0.0 && r < 1.0, "reflectivity", r, "check needs 0 < r < 1")
}

fn flux_worst(geom: &CavityGeometry, t_grid: &[f64]) -> Result<Worst> {
    require_leaky(geom)?;
    let kappa = kappa_exact(geom)?;
    let mut worst = Worst::default();
    for &t in t_grid {
        let classical = undriven_intensity(geom, t, 1.0)?;
        let quantum = (-kappa * t).exp();
        worst.offer((classical - quantum).abs(), &[("n", geom.refractive_index), ("t", t)]);
    }
    Ok(worst)
}

/// Classical undriven decay `I(t)/I0` against `exp(-kappa t)`.
pub fn check_flux_condition(geom: &CavityGeometry, t_grid: &[f64]) -> Result<ConsistencyReport> {
    let grid = format!("n={} t:{} points", geom.refractive_index, t_grid.len());
    Ok(ConsistencyReport::new("flux_condition", grid, Some(FLUX_TOL), flux_worst(geom, t_grid)?))
}

fn ratio_worst(geom: &CavityGeometry, phi_grid: &[f64], kappa_scale: f64) -> Result<Worst> {
    require_leaky(geom)?;
    let tau = geom.transit_time();
    let kappa = kappa_scale * kappa_exact(geom)?;
    let mut worst = Worst::default();
    for &phi in phi_grid {
        let omega0 = phi / tau;
        let j = coupling_exact(geom, omega0)?;
        let classical = cavity_rates(geom, omega0)?;
        let d = j * j + kappa * kappa;
        let left = (j * j / d - classical.reflection).abs();
        let right = (kappa * kappa / d - classical.transmission).abs();
        worst.offer(left.max(right), &[("n", geom.refractive_index), ("phi", phi)]);
    }
    Ok(worst)
}

/// Emission split `J^2/(J^2+kappa^2)`, `kappa^2/(J^2+kappa^2)` against the
/// classical reflection and transmission rates.
pub fn check_ratio_identity(geom: &CavityGeometry, phi_grid: &[f64]) -> Result<ConsistencyReport> {
    check_ratio_identity_scaled(geom, phi_grid, 1.0)
}

/// [`check_ratio_identity`] with `kappa` multiplied by `kappa_scale`. Any
/// scale other than 1 must make the check fail; this is its negative control.
pub fn check_ratio_identity_scaled(
    geom: &CavityGeometry,
    phi_grid: &[f64],
    kappa_scale: f64,
) -> Result<ConsistencyReport> {
    let name =
        if kappa_scale == 1.0 { "ratio_identity".to_owned() } else { format!("ratio_identity[kappa x {kappa_scale}]") };
    let grid = format!("n={} phi:{} points", geom.refractive_index, phi_grid.len());
    Ok(ConsistencyReport::new(&name, grid, Some(RATIO_TOL), ratio_worst(geom, phi_grid, kappa_scale)?))
}

/// Step used when two rate systems are compared: fine enough for accuracy,
/// and identical for both so that integrator error is shared.
fn comparison_step(max_rate: f64) -> f64 {
    StepperConfig::for_max_rate(max_rate).dt
}

fn total_gap(p: &TravelingWaveParams, rabi: f64, detuning: f64, kappa: f64, duration: f64) -> Result<Worst> {
    let dt = comparison_step(p.max_rate().max(detuning.abs()));
    let traveling = evolve_traveling_fixed(p, RateState5::VACUUM, duration, dt, 1)?;
    let single = evolve_single_mode_fixed(rabi, detuning, kappa, SingleModeState::VACUUM, duration, dt, 1)?;
    let mut worst = Worst::default();
    for ((t, a), (_, b)) in traveling.iter().zip(single.iter()) {
        worst.offer((a.n_total() - b.n).abs(), &[("detuning", detuning), ("t", t)]);
    }
    Ok(worst)
}

/// Traveling-wave model with `J = -2 Delta` against the single-mode model,
/// both from vacuum: largest `|n_Tot(t) - n(t)|`.
pub fn compare_near_resonant(rabi: f64, detuning: f64, kappa: f64, duration: f64) -> Result<ConsistencyReport> {
    require(kappa > 0.0 && kappa.is_finite(), "kappa", kappa, "must be positive and finite")?;
    let p = TravelingWaveParams::near_resonant(kappa, rabi, detuning)?;
    let worst = total_gap(&p, rabi, detuning, kappa, duration)?;
    let grid = format!("rabi={rabi} detuning={detuning} kappa={kappa} T={duration}");
    let name = format!("near_resonant[detuning={detuning}]");
    Ok(ConsistencyReport::new(&name, grid, Some(NEAR_RESONANT_TOL), worst))
}

/// Same comparison, but the traveling-wave model uses the exact `J(omega0)`
/// and `kappa` of the cavity, while the single-mode model uses the detuning
/// from the nearest resonance. The gap is an approximation error, reported
/// without a gate.
pub fn near_resonant_gap<R: Resonator>(cavity: &R, omega0: f64, rabi: f64, duration: f64) -> Result<ConsistencyReport> {
    require_leaky(cavity)?;
    let kappa = kappa_exact(cavity)?;
    let (detuning, m) = nearest_detuning(cavity, omega0)?;
    let p = TravelingWaveParams::with_detuning(kappa, coupling_exact(cavity, omega0)?, rabi, detuning)?;
    let worst = total_gap(&p, rabi, detuning, kappa, duration)?;
    let grid = format!("omega0={omega0} mode={m} J={:e} -2*detuning={:e} T={duration}", p.coupling, -2.0 * detuning);
    Ok(ConsistencyReport::new("near_resonant_gap", grid, None, worst))
}

/// `sup_phi |J|`, reached where `|sin phi| = 1`.
fn coupling_envelope(cavity: &MirrorCavity) -> Result<f64> {
    coupling_exact(cavity, 0.5 * PI / cavity.transit_time).map(f64::abs)
}

/// `kappa` and `sup|J|` for growing transit times: both must scale exactly as
/// `1/tau`, decrease monotonically, and drop below 1e-6 at the longest cavity.
///
/// The deviation is the largest relative drift of `kappa tau` and
/// `sup|J| tau` from their values at the first grid point; a monotonicity
/// break or a bound violation at the end counts as deviation 1.
pub fn check_free_field_limit(r: f64, scale_grid: &[f64]) -> Result<ConsistencyReport> {
    require(r > 0.0 && r < 1.0, "reflectivity", r, "check needs 0 < r < 1")?;
    require(!scale_grid.is_empty(), "scale_grid", 0.0, "needs at least one transit time")?;

    let mut worst = Worst::default();
    let mut reference = None;
    let mut previous = (f64::INFINITY, f64::INFINITY, 0.0);
    let mut last = (0.0, 0.0);
    for &tau in scale_grid {
        let cav = MirrorCavity::new(r, tau)?;
        let kappa = kappa_exact(&cav)?;
        let envelope = coupling_envelope(&cav)?;
        let (k_ref, j_ref) = *reference.get_or_insert((kappa * tau, envelope * tau));
        let mut dev = ((kappa * tau - k_ref) / k_ref).abs().max(((envelope * tau - j_ref) / j_ref).abs());
        if tau > previous.2 && (kappa >= previous.0 || envelope >= previous.1) {
            dev = dev.max(1.0);
        }
        worst.offer(dev, &[("r", r), ("transit_time", tau)]);
        previous = (kappa, envelope, tau);
        last = (kappa, envelope);
    }
    if last.0 >= FREE_FIELD_BOUND || last.1 >= FREE_FIELD_BOUND {
        worst.offer(1.0, &[("r", r), ("transit_time", previous.2)]);
    }
    let grid = format!(
        "r={r} transit_time:{}..{} ({} points)",
        scale_grid[0],
        scale_grid[scale_grid.len() - 1],
        scale_grid.len()
    );
    Ok(ConsistencyReport::new("free_field_limit", grid, Some(SCALING_TOL), worst))
}

/// Refractive indices used by the default grids.
pub const DEFAULT_INDICES: [f64; 3] = [1.5, 3.0, 20.0];

/// 1001 times on `[0, 10]` in units of the transit time.
pub fn default_time_grid() -> Vec<f64> {
    linspace(0.0, 10.0, 1001)
}

/// 1000 phases strictly inside `(0, 2 pi)`: `2 pi k / 1001`, `k = 1..=1000`.
pub fn default_phase_grid() -> Vec<f64> {
    (1..=1000).map(|k| 2.0 * PI * k as f64 / 1001.0).collect()
}

/// Transit times `1, 10, ..., 1e7`.
pub fn default_scale_grid() -> Vec<f64> {
    (0..=7).map(|e| 10f64.powi(e)).collect()
}

/// Detunings (in units of kappa) for the near-resonant comparison.
pub const DEFAULT_DETUNINGS: [f64; 4] = [0.0, 0.1, 0.5, 1.0];

fn over_indices(name: &str, tol: f64, f: impl Fn(&CavityGeometry) -> Result<Worst>) -> Result<ConsistencyReport> {
    let mut worst = Worst::default();
    for n in DEFAULT_INDICES {
        worst.merge(f(&CavityGeometry::natural(n)?)?);
    }
    let grid = format!("n in {DEFAULT_INDICES:?}");
    Ok(ConsistencyReport::new(name, grid, Some(tol), worst))
}

/// Flux condition over the default indices and times.
pub fn default_flux_check() -> Result<ConsistencyReport> {
    let times = default_time_grid();
    over_indices("flux_condition", FLUX_TOL, |g| flux_worst(g, &times))
}

/// Ratio identity over the default indices and phases, with `kappa` scaled.
pub fn default_ratio_check(kappa_scale: f64) -> Result<ConsistencyReport> {
    let phases = default_phase_grid();
    let name =
        if kappa_scale == 1.0 { "ratio_identity".to_owned() } else { format!("ratio_identity[kappa x {kappa_scale}]") };
    over_indices(&name, RATIO_TOL, |g| ratio_worst(g, &phases, kappa_scale))
}

/// Ratio identity at `samples` seeded random points with
/// `n` in `[1.01, 50]` and `phi` in `(0, 2 pi)`.
pub fn fuzz_ratio_identity(seed: u64, samples: usize, kappa_scale: f64) -> Result<ConsistencyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Worst::default();
    for _ in 0..samples {
        let n = rng.gen_range(1.01..=50.0);
        let phi = rng.gen_range(f64::EPSILON..2.0 * PI);
        worst.merge(ratio_worst(&CavityGeometry::natural(n)?, &[phi], kappa_scale)?);
    }
    let grid = format!("seed={seed} samples={samples}");
    Ok(ConsistencyReport::new("ratio_identity_fuzz", grid, Some(RATIO_TOL), worst))
}

/// Every gated check on its default grid. `kappa_scale` other than 1 injects
/// a fault into the ratio checks; `fuzz` adds a seeded random ratio check.
pub fn default_suite(kappa_scale: f64, fuzz: Option<(u64, usize)>) -> Result<Vec<ConsistencyReport>> {
    let mut reports = vec![default_flux_check()?, default_ratio_check(kappa_scale)?];
    if let Some((seed, samples)) = fuzz {
        reports.push(fuzz_ratio_identity(seed, samples, kappa_scale)?);
    }
    for d in DEFAULT_DETUNINGS {
        reports.push(compare_near_resonant(1.0, d, 1.0, 10.0)?);
    }
    reports.push(check_free_field_limit(0.5, &default_scale_grid())?);
    Ok(reports)
}
