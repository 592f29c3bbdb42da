//! First-moment (rate equation) dynamics of the cavity models.
//!
//! The traveling-wave model closes on five expectation values
//! `(n_L, n_R, k1, k2, k3)`; the single standing-wave mode closes on three,
//! `(n, k1, k2)`. All systems are linear with constant coefficients, so their
//! stationary states are unique whenever `kappa > 0`.

use serde::Serialize;

use crate::error::{require, Error, Result};
use crate::numerics::{dense_solve, rk4_fixed, rk4_integrate, OdeState, StepperConfig, Trajectory};
use crate::parameters::TravelingWaveParams;

/// Expectation values evolved by the traveling-wave rate equations.
///
/// `k1 = <a_L + a_L^dag>`, `k2 = i <a_R - a_R^dag>` and
/// `k3 = i <a_L a_R^dag - a_L^dag a_R>`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RateState5 {
    pub n_left: f64,
    pub n_right: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl RateState5 {
    pub const VACUUM: Self = Self { n_left: 0.0, n_right: 0.0, k1: 0.0, k2: 0.0, k3: 0.0 };

    pub fn from_array(v: [f64; 5]) -> Self {
        Self { n_left: v[0], n_right: v[1], k1: v[2], k2: v[3], k3: v[4] }
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.n_left, self.n_right, self.k1, self.k2, self.k3]
    }

    pub fn n_total(&self) -> f64 {
        self.n_left + self.n_right
    }
}

impl OdeState for RateState5 {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.n_left += a * x.n_left;
        self.n_right += a * x.n_right;
        self.k1 += a * x.k1;
        self.k2 += a * x.k2;
        self.k3 += a * x.k3;
    }
    fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array().iter().zip(other.to_array()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
    fn all_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Expectation values of the single standing-wave mode:
/// `n = <c^dag c>`, `k1 = <c + c^dag>`, `k2 = i <c - c^dag>`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SingleModeState {
    pub n: f64,
    pub k1: f64,
    pub k2: f64,
}

impl SingleModeState {
    pub const VACUUM: Self = Self { n: 0.0, k1: 0.0, k2: 0.0 };

    fn to_array(self) -> [f64; 3] {
        [self.n, self.k1, self.k2]
    }
}

impl OdeState for SingleModeState {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.n += a * x.n;
        self.k1 += a * x.k1;
        self.k2 += a * x.k2;
    }
    fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array().iter().zip(other.to_array()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
    fn all_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Photon emission rates through the left and right mirror.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EmissionRates {
    pub left: f64,
    pub right: f64,
    /// Always `left + right`.
    pub total: f64,
}

impl EmissionRates {
    fn new(left: f64, right: f64) -> Self {
        Self { left, right, total: left + right }
    }

    /// `(I_L / I_tot, I_R / I_tot)`, or `None` when nothing is emitted.
    pub fn ratios(&self) -> Option<(f64, f64)> {
        (self.total > 0.0).then(|| (self.left / self.total, self.right / self.total))
    }
}

/// Right-hand side of the five traveling-wave rate equations.
pub fn traveling_rhs(s: &RateState5, p: &TravelingWaveParams) -> RateState5 {
    let (kappa, j, omega) = (p.kappa, p.coupling, p.rabi);
    RateState5 {
        n_left: 0.5 * j * s.k3 - kappa * s.n_left,
        n_right: 0.5 * omega * s.k2 - 0.5 * j * s.k3 - kappa * s.n_right,
        k1: -0.5 * j * s.k2 - 0.5 * kappa * s.k1,
        k2: omega + 0.5 * j * s.k1 - 0.5 * kappa * s.k2,
        // The drive enters k3 with Omega/2, as it does everywhere else.
        k3: -0.5 * omega * s.k1 - j * (s.n_left - s.n_right) - kappa * s.k3,
    }
}

/// Right-hand side of the single-mode rate equations.
pub fn single_mode_rhs(s: &SingleModeState, rabi: f64, detuning: f64, kappa: f64) -> SingleModeState {
    SingleModeState {
        n: 0.5 * rabi * s.k2 - kappa * s.n,
        k1: -detuning * s.k2 - 0.5 * kappa * s.k1,
        k2: rabi + detuning * s.k1 - 0.5 * kappa * s.k2,
    }
}

/// Closed rate equations for `(n_Tot, k1, k2)` of the traveling-wave model
/// under `J = -2 Delta`. Here `s.n` holds the total photon number.
pub fn reduced_total_rhs(s: &SingleModeState, rabi: f64, detuning: f64, kappa: f64) -> SingleModeState {
    SingleModeState {
        n: 0.5 * rabi * s.k2 - kappa * s.n,
        k1: -detuning * s.k2 - 0.5 * kappa * s.k1,
        k2: rabi + detuning * s.k1 - 0.5 * kappa * s.k2,
    }
}

/// Integrates any of the rate systems with the gated RK4 stepper.
pub fn evolve<S, F>(rhs: F, s0: S, duration: f64, dt: f64) -> Result<Trajectory<S>>
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    rk4_integrate(rhs, s0, duration, &StepperConfig::with_dt(dt))
}

fn params_metadata(p: &TravelingWaveParams) -> [(&'static str, f64); 4] {
    [("kappa", p.kappa), ("coupling", p.coupling), ("rabi", p.rabi), ("detuning", p.detuning)]
}

/// Traveling-wave trajectory with the default step policy.
pub fn evolve_traveling(p: &TravelingWaveParams, s0: RateState5, duration: f64) -> Result<Trajectory<RateState5>> {
    evolve_traveling_with(p, s0, duration, &StepperConfig::for_max_rate(p.max_rate()))
}

pub fn evolve_traveling_with(
    p: &TravelingWaveParams,
    s0: RateState5,
    duration: f64,
    cfg: &StepperConfig,
) -> Result<Trajectory<RateState5>> {
    let p = *p;
    Ok(rk4_integrate(move |s| traveling_rhs(s, &p), s0, duration, cfg)?.with_metadata(params_metadata(&p)))
}

/// Traveling-wave trajectory on an exact fixed step (no convergence gate).
pub fn evolve_traveling_fixed(
    p: &TravelingWaveParams,
    s0: RateState5,
    duration: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory<RateState5>> {
    let p = *p;
    Ok(rk4_fixed(move |s| traveling_rhs(s, &p), s0, duration, dt, stride, usize::MAX)?
        .with_metadata(params_metadata(&p)))
}

pub fn evolve_single_mode(
    rabi: f64,
    detuning: f64,
    kappa: f64,
    s0: SingleModeState,
    duration: f64,
    cfg: &StepperConfig,
) -> Result<Trajectory<SingleModeState>> {
    Ok(rk4_integrate(move |s| single_mode_rhs(s, rabi, detuning, kappa), s0, duration, cfg)?.with_metadata([
        ("kappa", kappa),
        ("rabi", rabi),
        ("detuning", detuning),
    ]))
}

pub fn evolve_single_mode_fixed(
    rabi: f64,
    detuning: f64,
    kappa: f64,
    s0: SingleModeState,
    duration: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory<SingleModeState>> {
    Ok(rk4_fixed(move |s| single_mode_rhs(s, rabi, detuning, kappa), s0, duration, dt, stride, usize::MAX)?
        .with_metadata([("kappa", kappa), ("rabi", rabi), ("detuning", detuning)]))
}

fn require_damped(kappa: f64) -> Result<()> {
    if kappa == 0.0 {
        return Err(Error::NoStationaryState("kappa = 0 leaves the drive undamped"));
    }
    require(kappa > 0.0 && kappa.is_finite(), "kappa", kappa, "must be positive and finite")
}

/// Stationary state of the traveling-wave rate equations in closed form.
pub fn traveling_steady_state(p: &TravelingWaveParams) -> Result<RateState5> {
    require_damped(p.kappa)?;
    let (kappa, j, omega) = (p.kappa, p.coupling, p.rabi);
    let d = j * j + kappa * kappa;
    let closed = RateState5 {
        n_left: omega * omega * j * j / (d * d),
        n_right: omega * omega * kappa * kappa / (d * d),
        k1: -2.0 * omega * j / d,
        k2: 2.0 * omega * kappa / d,
        k3: 2.0 * kappa * omega * omega * j / (d * d),
    };
    debug_assert!(
        traveling_steady_state_linear(p)
            .map(|lin| lin.max_abs_diff(&closed) <= 1e-12 * closed.max_abs().max(1.0))
            .unwrap_or(false),
        "closed-form steady state disagrees with the linear solve"
    );
    Ok(closed)
}

/// Stationary state from a dense solve of `traveling_rhs(s) = 0`.
pub fn traveling_steady_state_linear(p: &TravelingWaveParams) -> Result<RateState5> {
    let (kappa, j, omega) = (p.kappa, p.coupling, p.rabi);
    let a = [
        [-kappa, 0.0, 0.0, 0.0, 0.5 * j],
        [0.0, -kappa, 0.0, 0.5 * omega, -0.5 * j],
        [0.0, 0.0, -0.5 * kappa, -0.5 * j, 0.0],
        [0.0, 0.0, 0.5 * j, -0.5 * kappa, 0.0],
        [-j, j, -0.5 * omega, 0.0, -kappa],
    ];
    let b = [0.0, 0.0, 0.0, -omega, 0.0];
    Ok(RateState5::from_array(dense_solve(a, b)?))
}

/// `I_A = kappa n_A`.
pub fn emission_rates(s: &RateState5, kappa: f64) -> EmissionRates {
    EmissionRates::new(kappa * s.n_left, kappa * s.n_right)
}

/// Stationary emission rates through each mirror, in closed form.
pub fn steady_emission_split(p: &TravelingWaveParams) -> Result<EmissionRates> {
    require_damped(p.kappa)?;
    let (kappa, j, omega) = (p.kappa, p.coupling, p.rabi);
    let d = j * j + kappa * kappa;
    let w2 = omega * omega;
    Ok(EmissionRates::new(w2 * j * j * kappa / (d * d), w2 * kappa.powi(3) / (d * d)))
}

/// Stationary state and emission rate of the single-mode model.
pub fn single_mode_steady(rabi: f64, detuning: f64, kappa: f64) -> Result<(SingleModeState, f64)> {
    require_damped(kappa)?;
    let d = 4.0 * detuning * detuning + kappa * kappa;
    let state = SingleModeState { n: rabi * rabi / d, k1: -4.0 * rabi * detuning / d, k2: 2.0 * rabi * kappa / d };
    debug_assert!(
        single_mode_steady_linear(rabi, detuning, kappa)
            .map(|lin| lin.max_abs_diff(&state) <= 1e-12 * state.max_abs().max(1.0))
            .unwrap_or(false),
        "closed-form single-mode steady state disagrees with the linear solve"
    );
    Ok((state, kappa * state.n))
}

pub fn single_mode_steady_linear(rabi: f64, detuning: f64, kappa: f64) -> Result<SingleModeState> {
    let a = [[-kappa, 0.0, 0.5 * rabi], [0.0, -0.5 * kappa, -detuning], [0.0, detuning, -0.5 * kappa]];
    let [n, k1, k2] = dense_solve(a, [0.0, 0.0, -rabi])?;
    Ok(SingleModeState { n, k1, k2 })
}

/// Total stationary emission `Omega^2 kappa / (4 Delta^2 + kappa^2)`.
pub fn lorentzian_total_rate(rabi: f64, detuning: f64, kappa: f64) -> Result<f64> {
    require_damped(kappa)?;
    Ok(rabi * rabi * kappa / (4.0 * detuning * detuning + kappa * kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(kappa: f64, j: f64, omega: f64) -> TravelingWaveParams {
        TravelingWaveParams::new(kappa, j, omega).unwrap()
    }

    #[test]
    fn rhs_of_vacuum_is_drive() {
        let d = traveling_rhs(&RateState5::VACUUM, &params(1.0, 0.7, 1.0));
        assert_eq!(d.to_array(), [0.0, 0.0, 0.0, 1.0, 0.0]);
        let d = single_mode_rhs(&SingleModeState::VACUUM, 1.0, 0.3, 1.0);
        assert_eq!(d.to_array(), [0.0, 0.0, 1.0]);
        let d = reduced_total_rhs(&SingleModeState::VACUUM, 1.0, 0.3, 1.0);
        assert_eq!(d.to_array(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn undriven_total_decays_at_kappa() {
        let p = params(0.8, 1.3, 0.0);
        let s = RateState5 { n_left: 0.4, n_right: 1.1, k1: 0.0, k2: 0.0, k3: 0.0 };
        let d = traveling_rhs(&s, &p);
        assert_abs_diff_eq!(d.n_left + d.n_right, -0.8 * 1.5, epsilon = 1e-15);
    }

    #[test]
    fn resonant_block_matches_single_mode() {
        let p = params(0.9, 0.0, 1.2);
        let s = RateState5 { n_left: 0.0, n_right: 0.3, k1: 0.0, k2: 0.7, k3: 0.0 };
        let d = traveling_rhs(&s, &p);
        assert_eq!(d.n_left, 0.0);
        let single = single_mode_rhs(&SingleModeState { n: 0.3, k1: 0.0, k2: 0.7 }, 1.2, 0.0, 0.9);
        assert_eq!(d.n_right, single.n);
        assert_eq!(d.k2, single.k2);
    }

    #[test]
    fn reduced_and_single_mode_agree() {
        for s in [SingleModeState { n: 0.2, k1: -0.4, k2: 1.1 }, SingleModeState { n: 3.0, k1: 2.0, k2: -1.0 }] {
            assert_eq!(reduced_total_rhs(&s, 0.7, 0.25, 1.3), single_mode_rhs(&s, 0.7, 0.25, 1.3));
        }
    }

    #[test]
    fn steady_state_examples() {
        let s = traveling_steady_state(&params(1.0, 0.0, 1.0)).unwrap();
        assert_eq!((s.n_left, s.n_right), (0.0, 1.0));

        let s = traveling_steady_state(&params(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(s.to_array(), [0.25, 0.25, -1.0, 1.0, 0.5]);

        let s = traveling_steady_state(&params(1.0, 0.6, 0.0)).unwrap();
        assert_eq!(s.max_abs(), 0.0);

        assert!(matches!(traveling_steady_state(&params(0.0, 1.0, 1.0)), Err(Error::NoStationaryState(_))));
    }

    #[test]
    fn linear_solve_matches_closed_form() {
        let lin = traveling_steady_state_linear(&params(1.0, 1.0, 1.0)).unwrap();
        let expect = [0.25, 0.25, -1.0, 1.0, 0.5];
        for (a, b) in lin.to_array().iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(matches!(traveling_steady_state_linear(&params(0.0, 1.0, 1.0)), Err(Error::Singular { .. })));
    }

    #[test]
    fn steady_state_is_stationary() {
        for (k, j, w) in [(1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (0.3, -2.0, 0.7), (2.0, 0.1, 5.0)] {
            let p = params(k, j, w);
            let ss = traveling_steady_state(&p).unwrap();
            assert!(traveling_rhs(&ss, &p).max_abs() <= 1e-13);
        }
    }

    #[test]
    fn emission_examples() {
        let p = params(1.0, 1.0, 1.0);
        let rates = emission_rates(&traveling_steady_state(&p).unwrap(), 1.0);
        assert_eq!((rates.left, rates.right, rates.total), (0.25, 0.25, 0.5));
        assert_eq!(emission_rates(&RateState5::VACUUM, 2.0), EmissionRates::default());

        let doubled = params(1.0, 1.0, 2.0);
        let r2 = emission_rates(&traveling_steady_state(&doubled).unwrap(), 1.0);
        assert_relative_eq!(r2.left, 4.0 * rates.left, max_relative = 1e-15);
        assert_relative_eq!(r2.right, 4.0 * rates.right, max_relative = 1e-15);
        assert_eq!(r2.ratios(), rates.ratios());
    }

    #[test]
    fn split_examples() {
        let split = steady_emission_split(&params(2.0, 0.0, 1.5)).unwrap();
        assert_eq!(split.left, 0.0);
        assert_abs_diff_eq!(split.right, 1.5 * 1.5 / 2.0, epsilon = 1e-15);

        let split = steady_emission_split(&params(1.0, 1.0, 1.0)).unwrap();
        assert_eq!((split.left, split.right, split.total), (0.25, 0.25, 0.5));

        let near = TravelingWaveParams::near_resonant(1.0, 1.0, 0.5).unwrap();
        let split = steady_emission_split(&near).unwrap();
        assert_abs_diff_eq!(split.left, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(split.right, 0.25, epsilon = 1e-15);

        assert!(steady_emission_split(&params(0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn single_mode_examples() {
        let (s, rate) = single_mode_steady(1.0, 0.0, 1.0).unwrap();
        assert_eq!((s.n, rate), (1.0, 1.0));
        assert!(single_mode_rhs(&s, 1.0, 0.0, 1.0).max_abs() <= 1e-14);

        let (_, half) = single_mode_steady(1.0, 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(half, 0.5, epsilon = 1e-15);

        let (s, rate) = single_mode_steady(0.0, 0.4, 1.0).unwrap();
        assert_eq!((s.max_abs(), rate), (0.0, 0.0));

        for (w, d, k) in [(1.0, 0.3, 1.0), (0.4, -1.2, 0.7)] {
            let (s, _) = single_mode_steady(w, d, k).unwrap();
            assert!(single_mode_rhs(&s, w, d, k).max_abs() <= 1e-14);
            let lin = single_mode_steady_linear(w, d, k).unwrap();
            assert!(lin.max_abs_diff(&s) <= 1e-12);
        }
        assert!(single_mode_steady(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn lorentzian_examples() {
        assert_eq!(lorentzian_total_rate(2.0, 0.0, 0.5).unwrap(), 8.0);
        assert_abs_diff_eq!(lorentzian_total_rate(1.0, 0.25, 0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lorentzian_total_rate(1.0, -0.25, 0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert!(lorentzian_total_rate(1.0, 1e9, 1.0).unwrap() < 1e-17);
        assert!(lorentzian_total_rate(1.0, 0.0, 0.0).is_err());

        for delta in [-1.0, 0.0, 0.2, 3.0] {
            let near = TravelingWaveParams::near_resonant(0.8, 1.3, delta).unwrap();
            let split = steady_emission_split(&near).unwrap();
            assert_abs_diff_eq!(split.total, lorentzian_total_rate(1.3, delta, 0.8).unwrap(), epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_duration_trajectory() {
        let s0 = RateState5 { n_left: 0.5, ..RateState5::VACUUM };
        let traj = evolve_traveling(&params(1.0, 0.0, 1.0), s0, 0.0).unwrap();
        assert_eq!(traj.states, vec![s0]);
    }

    #[test]
    fn undriven_trajectory() {
        let s0 = RateState5 { n_left: 1.0, n_right: 1.0, ..RateState5::VACUUM };
        let traj = evolve_traveling(&params(1.0, 0.0, 0.0), s0, 1.0).unwrap();
        assert_abs_diff_eq!(traj.final_state().n_total(), 2.0 * (-1.0f64).exp(), epsilon = 1e-9);
        assert_abs_diff_eq!(traj.final_state().n_total(), 0.735759, epsilon = 1e-6);
        assert!(traj.metadata.iter().any(|(k, v)| k == "kappa" && *v == 1.0));
    }

    #[test]
    fn long_run_reaches_steady_state() {
        let p = params(1.0, 0.0, 1.0);
        let traj = evolve_traveling(&p, RateState5::VACUUM, 30.0).unwrap();
        let ss = traveling_steady_state(&p).unwrap();
        assert!(traj.final_state().max_abs_diff(&ss) < 1e-6);
    }
}
