//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Reference values are computed here from closed forms or from an
//! independent model before they are compared with the library output.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use cavity_core::classical::{cavity_amplitudes, cavity_rates, rates_at_phase, undriven_intensity, CavityGeometry};
use cavity_core::consistency::{check_free_field_limit, compare_near_resonant, default_ratio_check};
use cavity_core::lindblad::{
    build_space, evolve_density_fixed, interaction_hamiltonian, single_photon_spectrum, DensityMatrix,
    LindbladGenerator, Observables,
};
use cavity_core::numerics::{linspace, StepperConfig};
use cavity_core::parameters::{coupling_exact, kappa_exact};
use cavity_core::rates::{
    evolve_traveling_fixed, evolve_traveling_with, lorentzian_total_rate, steady_emission_split, traveling_rhs,
    traveling_steady_state, traveling_steady_state_linear, RateState5,
};
use cavity_core::{MirrorCavity, Resonator, Result, TravelingWaveParams};

type Criterion = (&'static str, fn() -> Result<Verdict>);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { pass, detail: detail.into() })
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// Exact ratio identity over 1000 phases for three indices.
fn ratio_identity() -> Result<Verdict> {
    let rep = default_ratio_check(1.0)?;
    verdict(rep.max_dev <= 1e-12, format!("max_dev={:.2e} over 3 x 1000 phases (tol 1e-12)", rep.max_dev))
}

/// Transmission curves: unit peaks, analytic minima, sharper dips at higher index.
fn transmission_curves() -> Result<Verdict> {
    let slab3 = CavityGeometry::natural(3.0)?;
    let tau = slab3.transit_time();

    // Peaks at phi = m pi, taken from the amplitude |t_cav|^2 as well.
    let mut peak_dev: f64 = 0.0;
    for m in 1..=20 {
        let omega0 = m as f64 * PI / tau;
        let t = cavity_rates(&slab3, omega0)?.transmission;
        let t_amp = cavity_amplitudes(&slab3, omega0)?.t_cav.norm_sqr();
        peak_dev = peak_dev.max((t - 1.0).abs()).max((t_amp - 1.0).abs());
    }

    // r = 1/2: F = 16/9, T_min = 1/(1 + F) = 9/25.
    let min3 = rates_at_phase(0.5, 0.5 * PI).transmission;
    let dev3 = (min3 - 0.36).abs();
    // r = 19/21: T_min = ((1 - r^2)/(1 + r^2))^2 = (80/802)^2.
    let min20 = rates_at_phase(19.0 / 21.0, 0.5 * PI).transmission;
    let dev20 = (min20 - 0.009951).abs();
    let oracle20 = (80.0f64 / 802.0).powi(2);

    // Sampled curve minimum must not undercut the analytic minimum.
    let grid = linspace(0.0, 2.0 * PI, 4001);
    let sampled3 = grid.iter().map(|&p| rates_at_phase(0.5, p).transmission).fold(f64::INFINITY, f64::min);
    let sampled20 = grid.iter().map(|&p| rates_at_phase(19.0 / 21.0, p).transmission).fold(f64::INFINITY, f64::min);

    // Half-transmission width around a peak shrinks with the index.
    let width = |r: f64| {
        grid.iter()
            .filter(|&&p| {
                p < PI && rates_at_phase(r, p).transmission >= 0.5 * (1.0 + rates_at_phase(r, 0.5 * PI).transmission)
            })
            .count()
    };
    let sharper = width(19.0 / 21.0) < width(0.5);

    let pass = peak_dev <= 1e-12
        && dev3 <= 1e-12
        && dev20 <= 1e-6
        && (min20 - oracle20).abs() <= 1e-15
        && (sampled3 - min3).abs() <= 1e-12
        && (sampled20 - min20).abs() <= 1e-12
        && sharper;
    verdict(pass, format!("peak_dev={peak_dev:.2e} T_min(n=3)={min3:.15} T_min(n=20)={min20:.9} sharper={sharper}"))
}

/// Undriven decay in the classical, rate-equation and density-matrix pictures.
fn undriven_decay() -> Result<Verdict> {
    let slab = CavityGeometry::natural(3.0)?;
    let kappa = kappa_exact(&slab)?;
    let horizon = 10.0 / kappa;

    let classical = max_abs(
        linspace(0.0, horizon, 501)
            .into_iter()
            .map(|t| undriven_intensity(&slab, t, 1.0).map(|i| i - (-kappa * t).exp()).unwrap_or(f64::NAN)),
    );

    let j = coupling_exact(&slab, 0.3 / slab.transit_time())?;
    let p = TravelingWaveParams::new(kappa, j, 0.0)?;
    let start = RateState5 { n_left: 0.3, n_right: 0.7, ..RateState5::VACUUM };
    let traj = evolve_traveling_fixed(&p, start, horizon, 1e-3 / kappa, 10)?;
    let rates = max_abs(traj.iter().map(|(t, s)| s.n_total() - (-kappa * t).exp()));

    let space = build_space(2, 2)?;
    let h = interaction_hamiltonian(&space, 0.0, j)?;
    let gen = LindbladGenerator::traveling(&space, &h, kappa)?;
    let obs = Observables::new(&space)?;
    let rho0 = DensityMatrix::fock(&space, &[0, 1])?;
    let traj = evolve_density_fixed(rho0, &gen, horizon, 1e-3 / kappa, 10)?;
    let mut lindblad: f64 = 0.0;
    for (t, rho) in traj.iter() {
        let (s, _) = obs.traveling(rho, kappa)?;
        lindblad = lindblad.max((s.n_total() - (-kappa * t).exp()).abs());
    }

    verdict(
        classical <= 1e-12 && rates <= 1e-12 && lindblad <= 1e-8,
        format!("classical={classical:.2e} rate_eq={rates:.2e} lindblad={lindblad:.2e}"),
    )
}

/// Relaxation to the closed-form stationary state, and the dense solve.
fn steady_state_closed_forms() -> Result<Verdict> {
    let mut worst_rel: f64 = 0.0;
    let mut worst_solve: f64 = 0.0;
    for (omega, j, kappa) in [(1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (1.0, -2.0 * 0.5, 1.0)] {
        let p = TravelingWaveParams::new(kappa, j, omega)?;
        let closed = traveling_steady_state(&p)?;
        let solved = traveling_steady_state_linear(&p)?;
        let cfg = StepperConfig::with_dt(1e-3).stride(1000);
        let end = *evolve_traveling_with(&p, RateState5::VACUUM, 30.0 / kappa, &cfg)?.final_state();
        for ((c, s), e) in closed.to_array().into_iter().zip(solved.to_array()).zip(end.to_array()) {
            worst_solve = worst_solve.max((c - s).abs());
            if c != 0.0 {
                worst_rel = worst_rel.max(((e - c) / c).abs());
            } else {
                worst_rel = worst_rel.max(e.abs());
            }
        }
    }
    verdict(
        worst_rel <= 1e-6 && worst_solve <= 1e-12,
        format!("rk4_rel={worst_rel:.2e} (tol 1e-6) dense_solve={worst_solve:.2e} (tol 1e-12)"),
    )
}

/// Largest difference between density-matrix expectations and the rate
/// equations on the same time grid.
fn lindblad_gap(n_max: usize, rabi: f64, j: f64, kappa: f64, horizon: f64, dt: f64) -> Result<f64> {
    let p = TravelingWaveParams::new(kappa, j, rabi)?;
    let rates = evolve_traveling_fixed(&p, RateState5::VACUUM, horizon, dt, 1)?;

    let space = build_space(n_max, 2)?;
    let h = interaction_hamiltonian(&space, rabi, j)?;
    let gen = LindbladGenerator::traveling(&space, &h, kappa)?;
    let obs = Observables::new(&space)?;
    let dens = evolve_density_fixed(DensityMatrix::vacuum(&space), &gen, horizon, dt, 1)?;

    let mut gap: f64 = 0.0;
    for ((_, rho), (_, s)) in dens.iter().zip(rates.iter()) {
        let (q, _) = obs.traveling(rho, kappa)?;
        for (a, b) in q.to_array().into_iter().zip(s.to_array()) {
            gap = gap.max((a - b).abs());
        }
    }
    Ok(gap)
}

/// Density-matrix oracle against the rate equations, with truncation monotonicity.
fn lindblad_oracle() -> Result<Verdict> {
    let kappa = 1.0;
    let mut parts = Vec::new();
    let mut pass = true;
    for j in [0.0, kappa] {
        let gaps: Vec<f64> = [4, 6, 8]
            .into_iter()
            .map(|n| lindblad_gap(n, 0.2 * kappa, j, kappa, 10.0 / kappa, 0.01 / kappa))
            .collect::<Result<_>>()?;
        pass &= gaps[2] <= 1e-5 && gaps[0] > gaps[1] && gaps[1] > gaps[2];
        parts.push(format!("J={j}: gaps(4,6,8)=({:.1e},{:.1e},{:.1e})", gaps[0], gaps[1], gaps[2]));
    }
    verdict(pass, parts.join("; "))
}

/// Resonant drive: all emission on the right; an initial left population just decays.
fn resonant_regime() -> Result<Verdict> {
    let (omega, kappa) = (0.8, 1.3);
    let p = TravelingWaveParams::new(kappa, 0.0, omega)?;
    let split = steady_emission_split(&p)?;
    let ss = traveling_steady_state(&p)?;
    let dev_split = split.left.abs().max((split.right - omega * omega / kappa).abs());
    let dev_state = (kappa * ss.n_left).abs().max((kappa * ss.n_right - omega * omega / kappa).abs());

    let start = RateState5 { n_left: 1.0, ..RateState5::VACUUM };
    let traj = evolve_traveling_fixed(&p, start, 10.0 / kappa, 1e-3 / kappa, 10)?;
    let decay = max_abs(traj.iter().map(|(t, s)| s.n_left - (-kappa * t).exp()));

    verdict(
        dev_split <= 1e-12 && dev_state <= 1e-12 && decay <= 1e-9,
        format!("I_L,I_R dev={:.2e} n_L decay dev={decay:.2e}", dev_split.max(dev_state)),
    )
}

/// Traveling-wave model with J = -2 Delta against the single-mode model.
fn near_resonant_equivalence() -> Result<Verdict> {
    let kappa = 1.0;
    let mut traj_dev: f64 = 0.0;
    for d in [0.1, 0.5, 1.0] {
        traj_dev = traj_dev.max(compare_near_resonant(kappa, d * kappa, kappa, 10.0 / kappa)?.max_dev);
    }

    let total = |delta: f64| -> Result<f64> {
        let p = TravelingWaveParams::near_resonant(kappa, kappa, delta)?;
        Ok(kappa * traveling_steady_state(&p)?.n_total())
    };
    let mut lorentz_dev: f64 = 0.0;
    for delta in linspace(-3.0, 3.0, 601) {
        lorentz_dev = lorentz_dev.max((total(delta)? - lorentzian_total_rate(kappa, delta, kappa)?).abs());
    }

    // Half maximum located by bisection on each flank.
    let peak = total(0.0)?;
    let mut half_dev: f64 = 0.0;
    for sign in [-1.0, 1.0] {
        let (mut lo, mut hi) = (0.0, 3.0 * kappa);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(sign * mid)? > 0.5 * peak {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        half_dev = half_dev.max((0.5 * (lo + hi) - 0.5 * kappa).abs());
    }

    verdict(
        traj_dev <= 1e-9 && lorentz_dev <= 1e-12 && half_dev <= 1e-6,
        format!("trajectory={traj_dev:.2e} lorentzian={lorentz_dev:.2e} half_max={half_dev:.2e}"),
    )
}

/// Near-resonant split rates against the displayed forms.
fn near_resonant_split() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    for (omega, kappa) in [(1.0, 1.0), (0.3, 2.0)] {
        for delta in linspace(-2.0, 2.0, 81) {
            let p = TravelingWaveParams::near_resonant(kappa, omega, delta)?;
            let split = steady_emission_split(&p)?;
            let from_state = cavity_core::rates::emission_rates(&traveling_steady_state(&p)?, kappa);
            let l = 4.0 * delta * delta + kappa * kappa;
            let left = 4.0 * omega * omega * delta * delta * kappa / (l * l);
            let right = omega * omega * kappa.powi(3) / (l * l);
            for got in [split, from_state] {
                worst = worst.max((got.left - left).abs()).max((got.right - right).abs());
            }
        }
    }
    verdict(worst <= 1e-12, format!("max_dev={worst:.2e}"))
}

/// One-photon spectrum of the traveling-wave pair.
fn spectrum() -> Result<Verdict> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst: f64 = 0.0;
    for (omega, j) in [(1.0, 0.4), (2.0, -0.6), (5.0, 3.0), (1.0, 1e-3)] {
        let sp = single_photon_spectrum(omega, j);
        worst = worst
            .max((sp.plus - (omega + 0.5 * j)).abs())
            .max((sp.minus - (omega - 0.5 * j)).abs())
            .max((sp.plus_vector[0] - h).abs())
            .max((sp.plus_vector[1] - h).abs())
            .max((sp.minus_vector[0] - h).abs())
            .max((sp.minus_vector[1] + h).abs());
    }
    verdict(worst <= 1e-12, format!("max_dev={worst:.2e}"))
}

/// Emission ratios do not depend on the drive strength.
fn drive_scaling() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    for (kappa, j) in [(1.0, 0.0), (1.0, 1.0), (0.7, -2.3), (2.0, 0.05)] {
        let base =
            steady_emission_split(&TravelingWaveParams::new(kappa, j, 1.0)?)?.ratios().expect("driven cavity emits");
        for scale in [0.1, 2.0, 10.0] {
            let r = steady_emission_split(&TravelingWaveParams::new(kappa, j, scale)?)?
                .ratios()
                .expect("driven cavity emits");
            worst = worst.max((r.0 - base.0).abs()).max((r.1 - base.1).abs());
        }
    }
    verdict(worst <= 1e-14, format!("max_dev={worst:.2e}"))
}

/// kappa and J vanish as 1/d.
fn free_field() -> Result<Verdict> {
    let rep = check_free_field_limit(0.5, &(0..=7).map(|e| 10f64.powi(e)).collect::<Vec<_>>())?;
    let far = MirrorCavity::new(0.5, 1e7)?;
    let kappa = kappa_exact(&far)?;
    let envelope = 4.0 / 1e7 * (0.5 * 0.5f64.ln() / 0.75).abs();
    let sup_j = linspace(0.0, PI, 2001)
        .into_iter()
        .map(|phi| coupling_exact(&far, phi / 1e7).map(f64::abs).unwrap_or(f64::NAN))
        .fold(0.0, f64::max);
    let pass = rep.pass && kappa < 1e-6 && sup_j < 1e-6 && sup_j <= envelope * (1.0 + 1e-12);
    verdict(pass, format!("scaling_dev={:.2e} kappa={kappa:.4e} sup|J|={sup_j:.4e}", rep.max_dev))
}

/// Injected 1% error in kappa must break the ratio identity.
fn negative_control() -> Result<Verdict> {
    let rep = default_ratio_check(1.01)?;
    verdict(!rep.pass && rep.max_dev > 1e-4, format!("faulty max_dev={:.2e} (must exceed 1e-4 and fail)", rep.max_dev))
}

/// Stationarity of the closed form, a cheap extra guard on criterion 4.
fn stationarity_guard() -> f64 {
    let p = TravelingWaveParams::new(1.0, 1.0, 1.0).expect("valid");
    let ss = traveling_steady_state(&p).expect("damped");
    max_abs(traveling_rhs(&ss, &p).to_array())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("ratio identity", ratio_identity),
        ("transmission curves", transmission_curves),
        ("undriven decay", undriven_decay),
        ("steady-state closed forms", steady_state_closed_forms),
        ("lindblad oracle", lindblad_oracle),
        ("resonant regime", resonant_regime),
        ("near-resonant equivalence", near_resonant_equivalence),
        ("near-resonant split rates", near_resonant_split),
        ("single-photon spectrum", spectrum),
        ("drive-scaling invariance", drive_scaling),
        ("free-field limit", free_field),
        ("negative control", negative_control),
    ];

    let started = Instant::now();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (pass, detail) = match check() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} [{:>2}] {name}: {detail} ({:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            t0.elapsed().as_secs_f64()
        );
    }
    let guard = stationarity_guard();
    if guard > 1e-13 {
        failures += 1;
        println!("FAIL [--] stationarity guard: rhs at steady state = {guard:.2e}");
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failures.min(criteria.len()),
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
