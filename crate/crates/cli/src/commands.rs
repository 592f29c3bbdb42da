use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use cavity_core::classical::{cavity_rates, CavityGeometry, Resonator};
use cavity_core::consistency::{default_suite, near_resonant_gap, ConsistencyReport};
use cavity_core::lindblad::{
    build_space, evolve_density, interaction_hamiltonian, recommended_cutoff, DensityMatrix, LindbladGenerator,
    Observables,
};
use cavity_core::numerics::{linspace, rk4_integrate, StepperConfig};
use cavity_core::parameters::{coupling_exact, coupling_near_resonant, kappa_exact, nearest_detuning};
use cavity_core::rates::{
    evolve_single_mode, evolve_traveling_with, lorentzian_total_rate, reduced_total_rhs, steady_emission_split,
    traveling_steady_state, RateState5, SingleModeState,
};
use cavity_core::TravelingWaveParams;

use crate::config::{Model, Range, ScenarioConfig, Units};
use crate::failure::Failure;
use crate::output::{emit, float, to_json, Table};

const DEFAULT_RABI: f64 = 1.0;

fn geometry(cfg: &ScenarioConfig) -> Result<Option<CavityGeometry>, Failure> {
    let Some(g) = &cfg.geometry else {
        return Ok(None);
    };
    let geom = match cfg.units.unwrap_or_default() {
        Units::Natural => {
            if g.length.is_some() || g.light_speed.is_some() {
                return Err(Failure::usage("length and light_speed are only read with --units si"));
            }
            let n = g.refractive_index.ok_or_else(|| Failure::usage("geometry needs a refractive index (--n)"))?;
            CavityGeometry::natural(n)?
        }
        Units::Si => match (g.length, g.refractive_index, g.light_speed) {
            (Some(d), Some(n), Some(c)) => CavityGeometry::new(d, n, c)?,
            _ => return Err(Failure::usage("--units si needs length, refractive index and light speed")),
        },
    };
    Ok(Some(geom))
}

/// Model parameters from exactly one source: the slab geometry plus the
/// laser frequency, or directly given rates.
#[derive(Debug, Clone, Copy, Serialize)]
struct Resolved {
    kappa: f64,
    coupling: f64,
    rabi: f64,
    /// Known when set directly, or derived from the geometry.
    detuning: Option<f64>,
    mode_index: Option<usize>,
}

impl Resolved {
    fn params(&self) -> Result<TravelingWaveParams, Failure> {
        Ok(TravelingWaveParams::with_detuning(self.kappa, self.coupling, self.rabi, self.detuning.unwrap_or(0.0))?)
    }
}

fn resolve(cfg: &ScenarioConfig) -> Result<Resolved, Failure> {
    let rabi = cfg.drive.rabi.unwrap_or(DEFAULT_RABI);
    match (geometry(cfg)?, &cfg.direct) {
        (Some(_), Some(_)) => Err(Failure::usage("give either a geometry or direct rates (kappa/coupling), not both")),
        (None, None) => Err(Failure::usage("no cavity parameters: give a geometry (--n) or direct rates (--kappa)")),
        (Some(geom), None) => {
            if cfg.drive.detuning.is_some() {
                return Err(Failure::usage("with a geometry the detuning follows from --omega0; do not set it"));
            }
            let omega0 =
                cfg.drive.omega0.ok_or_else(|| Failure::usage("a geometry needs the laser frequency (--omega0)"))?;
            let (detuning, m) = nearest_detuning(&geom, omega0)?;
            Ok(Resolved {
                kappa: kappa_exact(&geom)?,
                coupling: coupling_exact(&geom, omega0)?,
                rabi,
                detuning: Some(detuning),
                mode_index: Some(m),
            })
        }
        (None, Some(direct)) => {
            if cfg.drive.omega0.is_some() {
                return Err(Failure::usage("--omega0 needs a geometry; with direct rates give --detuning"));
            }
            let kappa = direct.kappa.ok_or_else(|| Failure::usage("direct rates need --kappa"))?;
            let detuning = cfg.drive.detuning;
            // Without an explicit J, the near-resonant rule J = -2 Delta applies.
            // Adding 0.0 turns the -0.0 of a zero detuning into 0.0.
            let coupling = direct.coupling.unwrap_or_else(|| coupling_near_resonant(detuning.unwrap_or(0.0)) + 0.0);
            Ok(Resolved { kappa, coupling, rabi, detuning, mode_index: None })
        }
    }
}

pub fn sweep_transmission(cfg: &ScenarioConfig) -> Result<(), Failure> {
    if cfg.direct.is_some() {
        return Err(Failure::usage("sweep-transmission derives kappa and J from the geometry"));
    }
    let geom = geometry(cfg)?.ok_or_else(|| Failure::usage("sweep-transmission needs a geometry (--n)"))?;
    let range = cfg.sweep.resolve(Range { start: 0.0, stop: 2.0 * PI, points: 1001 })?;
    if range.start < 0.0 {
        return Err(Failure::usage("phases must be non-negative"));
    }
    let tau = geom.transit_time();
    let kappa = kappa_exact(&geom)?;

    let rows: Vec<Vec<f64>> = linspace(range.start, range.stop, range.points)
        .into_par_iter()
        .map(|phi| -> Result<Vec<f64>, Failure> {
            let omega0 = phi / tau;
            let classical = cavity_rates(&geom, omega0)?;
            let p = TravelingWaveParams::new(kappa, coupling_exact(&geom, omega0)?, 1.0)?;
            let (left, right) = steady_emission_split(&p)?
                .ratios()
                .ok_or_else(|| Failure::Numerical("driven cavity emits nothing".into()))?;
            Ok(vec![phi, classical.reflection, classical.transmission, left, right])
        })
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(vec!["phi", "R_cav", "T_cav", "ratio_L", "ratio_R"]);
    rows.into_iter().for_each(|r| table.push(r));
    let t_min = table.rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    let summary = format!(
        "n = {}  r = {}  kappa = {}  T_min = {}  ({} phases)\n",
        geom.refractive_index,
        float(geom.reflectivity()),
        float(kappa),
        float(t_min),
        table.rows.len()
    );
    emit(cfg.out(), &table.render(cfg.format()), &summary)
}

#[derive(Debug, Serialize)]
struct SteadyReport {
    kappa: f64,
    coupling: f64,
    rabi: f64,
    detuning: Option<f64>,
    mode_index: Option<usize>,
    n_left: f64,
    n_right: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    i_left: f64,
    i_right: f64,
    i_total: f64,
}

pub fn steady(cfg: &ScenarioConfig, detuning_sweep: bool) -> Result<(), Failure> {
    if detuning_sweep {
        return steady_sweep(cfg);
    }
    let res = resolve(cfg)?;
    let p = res.params()?;
    let ss = traveling_steady_state(&p)?;
    let rates = steady_emission_split(&p)?;
    let report = SteadyReport {
        kappa: res.kappa,
        coupling: res.coupling,
        rabi: res.rabi,
        detuning: res.detuning,
        mode_index: res.mode_index,
        n_left: ss.n_left,
        n_right: ss.n_right,
        k1: ss.k1,
        k2: ss.k2,
        k3: ss.k3,
        i_left: rates.left,
        i_right: rates.right,
        i_total: rates.total,
    };

    let mut text = String::new();
    for (name, v) in [
        ("kappa", report.kappa),
        ("J", report.coupling),
        ("Omega", report.rabi),
        ("n_L", report.n_left),
        ("n_R", report.n_right),
        ("I_L", report.i_left),
        ("I_R", report.i_right),
        ("I_tot", report.i_total),
    ] {
        let _ = writeln!(text, "{name:>6} = {:>24}", float(v));
    }
    let document = match cfg.format() {
        crate::config::Format::Json => to_json(&report),
        crate::config::Format::Csv => {
            let mut t = Table::new(vec!["kappa", "J", "Omega", "n_L", "n_R", "I_L", "I_R", "I_tot"]);
            t.push(vec![
                report.kappa,
                report.coupling,
                report.rabi,
                report.n_left,
                report.n_right,
                report.i_left,
                report.i_right,
                report.i_total,
            ]);
            t.to_csv()
        }
    };
    emit(cfg.out(), &document, &text)
}

/// Stationary rates against the detuning under `J = -2 Delta`, next to the
/// Lorentzian.
fn steady_sweep(cfg: &ScenarioConfig) -> Result<(), Failure> {
    if cfg.geometry.is_some() {
        return Err(Failure::usage("the detuning sweep takes --kappa, not a geometry"));
    }
    let direct = cfg.direct.as_ref().ok_or_else(|| Failure::usage("the detuning sweep needs --kappa"))?;
    if direct.coupling.is_some() || cfg.drive.detuning.is_some() {
        return Err(Failure::usage("the detuning sweep sets J = -2 Delta itself; drop --coupling and --detuning"));
    }
    let kappa = direct.kappa.ok_or_else(|| Failure::usage("the detuning sweep needs --kappa"))?;
    let rabi = cfg.drive.rabi.unwrap_or(DEFAULT_RABI);
    let range = cfg.sweep.resolve(Range { start: -3.0 * kappa, stop: 3.0 * kappa, points: 601 })?;

    let rows: Vec<Vec<f64>> = linspace(range.start, range.stop, range.points)
        .into_par_iter()
        .map(|delta| -> Result<Vec<f64>, Failure> {
            let p = TravelingWaveParams::near_resonant(kappa, rabi, delta)?;
            let ss = traveling_steady_state(&p)?;
            let r = steady_emission_split(&p)?;
            Ok(vec![delta, ss.n_left, ss.n_right, r.left, r.right, r.total, lorentzian_total_rate(rabi, delta, kappa)?])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(vec!["detuning", "n_L", "n_R", "I_L", "I_R", "I_tot", "lorentzian"]);
    rows.into_iter().for_each(|r| table.push(r));
    let summary = format!(
        "kappa = {}  Omega = {}  peak I_tot = {}  half maximum at detuning = +-{}\n",
        float(kappa),
        float(rabi),
        float(lorentzian_total_rate(rabi, 0.0, kappa)?),
        float(0.5 * kappa)
    );
    emit(cfg.out(), &table.render(cfg.format()), &summary)
}

fn five_state(initial: Option<&[f64]>) -> Result<RateState5, Failure> {
    match initial {
        None => Ok(RateState5::VACUUM),
        Some(v) => <[f64; 5]>::try_from(v)
            .map(RateState5::from_array)
            .map_err(|_| Failure::usage(format!("this model takes 5 initial values, got {}", v.len()))),
    }
}

fn three_state(initial: Option<&[f64]>) -> Result<SingleModeState, Failure> {
    match initial {
        None => Ok(SingleModeState::VACUUM),
        Some(&[n, k1, k2]) => Ok(SingleModeState { n, k1, k2 }),
        Some(v) => Err(Failure::usage(format!("this model takes 3 initial values, got {}", v.len()))),
    }
}

fn five_row(t: f64, s: &RateState5, kappa: f64) -> Vec<f64> {
    vec![t, s.n_left, s.n_right, s.k1, s.k2, s.k3, kappa * s.n_left, kappa * s.n_right, kappa * s.n_total()]
}

const FIVE_COLUMNS: [&str; 9] = ["t", "n_L", "n_R", "k1", "k2", "k3", "I_L", "I_R", "I_tot"];
const THREE_COLUMNS: [&str; 5] = ["t", "n_tot", "k1", "k2", "I_tot"];

pub fn evolve(cfg: &ScenarioConfig) -> Result<(), Failure> {
    let res = resolve(cfg)?;
    let model = cfg.run.model.unwrap_or_default();
    let kappa = res.kappa;
    let duration = cfg.run.duration.unwrap_or(if kappa > 0.0 { 10.0 / kappa } else { 10.0 });
    let p = res.params()?;
    let mut stepper = StepperConfig::for_max_rate(p.max_rate());
    if let Some(dt) = cfg.run.dt {
        stepper.dt = dt;
    }
    let stepper = stepper.stride(cfg.run.stride.unwrap_or(1).max(1));
    let initial = cfg.run.initial.as_deref();

    let needs_detuning = || {
        res.detuning
            .ok_or_else(|| Failure::usage("this model needs a detuning (--detuning, or --omega0 with a geometry)"))
    };

    let table = match model {
        Model::Traveling5 => {
            let traj = evolve_traveling_with(&p, five_state(initial)?, duration, &stepper)?;
            let mut t = Table::new(FIVE_COLUMNS.to_vec());
            traj.iter().for_each(|(time, s)| t.push(five_row(time, s, kappa)));
            t
        }
        Model::SingleMode => {
            let traj =
                evolve_single_mode(res.rabi, needs_detuning()?, kappa, three_state(initial)?, duration, &stepper)?;
            let mut t = Table::new(THREE_COLUMNS.to_vec());
            traj.iter().for_each(|(time, s)| t.push(vec![time, s.n, s.k1, s.k2, kappa * s.n]));
            t
        }
        Model::ReducedTotal => {
            let (rabi, detuning) = (res.rabi, needs_detuning()?);
            let traj = rk4_integrate(
                move |s: &SingleModeState| reduced_total_rhs(s, rabi, detuning, kappa),
                three_state(initial)?,
                duration,
                &stepper,
            )?;
            let mut t = Table::new(THREE_COLUMNS.to_vec());
            traj.iter().for_each(|(time, s)| t.push(vec![time, s.n, s.k1, s.k2, kappa * s.n]));
            t
        }
        Model::Lindblad => lindblad_table(cfg, &p, initial, duration, &stepper)?,
    };
    let summary = format!(
        "model = {model:?}  kappa = {}  J = {}  Omega = {}  rows = {}\n",
        float(kappa),
        float(res.coupling),
        float(res.rabi),
        table.rows.len()
    );
    emit(cfg.out(), &table.render(cfg.format()), &summary)
}

fn lindblad_table(
    cfg: &ScenarioConfig,
    p: &TravelingWaveParams,
    initial: Option<&[f64]>,
    duration: f64,
    stepper: &StepperConfig,
) -> Result<Table, Failure> {
    let recommended = if p.kappa > 0.0 { Some(recommended_cutoff(p)?) } else { None };
    let n_max = match (cfg.run.n_max, recommended) {
        (Some(n), _) => n,
        (None, Some(r)) => r,
        (None, None) => return Err(Failure::usage("without damping give the photon cutoff explicitly (--n-max)")),
    };
    if let Some(r) = recommended {
        if n_max < r {
            eprintln!("warning: n_max = {n_max} is below the recommended cutoff {r} for these parameters");
            if !cfg.run.allow_small_cutoff.unwrap_or(false) {
                return Err(Failure::usage("rerun with --allow-small-cutoff to proceed anyway"));
            }
        }
    }

    let space = build_space(n_max, 2)?;
    let start = five_state(initial)?;
    let occupation = |v: f64| (v >= 0.0 && v.fract() == 0.0).then_some(v as usize);
    let rho0 = match (occupation(start.n_left), occupation(start.n_right), start.k1, start.k2, start.k3) {
        (Some(l), Some(r), 0.0, 0.0, 0.0) => DensityMatrix::fock(&space, &[l, r])?,
        _ => {
            return Err(Failure::usage(
                "the density-matrix model starts from a Fock state: integer n_L, n_R and zero k1, k2, k3",
            ))
        }
    };
    let h = interaction_hamiltonian(&space, p.rabi, p.coupling)?;
    let gen = LindbladGenerator::traveling(&space, &h, p.kappa)?;
    let obs = Observables::new(&space)?;
    let traj = evolve_density(rho0, &gen, duration, stepper)?;
    let mut t = Table::new(FIVE_COLUMNS.to_vec());
    for (time, rho) in traj.iter() {
        let (s, _) = obs.traveling(rho, p.kappa)?;
        t.push(five_row(time, &s, p.kappa));
    }
    Ok(t)
}

#[derive(Debug, Serialize)]
struct SuiteReport<'a> {
    all_pass: bool,
    reports: &'a [ConsistencyReport],
}

pub fn consistency(cfg: &ScenarioConfig, kappa_scale: f64, fuzz_samples: usize) -> Result<(), Failure> {
    if !(kappa_scale > 0.0 && kappa_scale.is_finite()) {
        return Err(Failure::usage("--kappa-fault must be a positive factor"));
    }
    let fuzz = cfg.seed.map(|s| (s, fuzz_samples));
    let mut reports = default_suite(kappa_scale, fuzz)?;
    // With a geometry and a laser frequency, also report how far the exact J
    // is from the near-resonant rule. Informational only.
    if let (Some(geom), Some(omega0)) = (geometry(cfg)?, cfg.drive.omega0) {
        let kappa = kappa_exact(&geom)?;
        let duration = cfg.run.duration.unwrap_or(10.0 / kappa);
        reports.push(near_resonant_gap(&geom, omega0, cfg.drive.rabi.unwrap_or(DEFAULT_RABI), duration)?);
    }

    let failed = reports.iter().filter(|r| !r.pass).count();
    let document = match cfg.format() {
        crate::config::Format::Json => to_json(&SuiteReport { all_pass: failed == 0, reports: &reports }),
        crate::config::Format::Csv => {
            let mut out = String::from("name,max_dev,tol,pass\n");
            for r in &reports {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    r.name,
                    float(r.max_dev),
                    r.tol.map(float).unwrap_or_default(),
                    u8::from(r.pass)
                );
            }
            out
        }
    };
    let summary: String = reports.iter().map(|r| format!("{r}\n")).collect();
    emit(cfg.out(), &document, &summary)?;
    if failed > 0 {
        Err(Failure::Consistency(failed))
    } else {
        Ok(())
    }
}
