//! Scenario configuration: a JSON file, overridden field by field by flags.
//!
//! ```json
//! {
//!   "units": "natural",
//!   "geometry": { "refractive_index": 3.0, "length": 0.5, "light_speed": 1.0 },
//!   "direct":   { "kappa": 1.0, "coupling": 0.0 },
//!   "drive":    { "rabi": 1.0, "omega0": 1.2, "detuning": 0.0 },
//!   "run":      { "model": "traveling5", "duration": 10.0, "dt": 0.001, "stride": 10,
//!                 "n_max": 8, "initial": [0, 0, 0, 0, 0], "allow_small_cutoff": false },
//!   "sweep":    { "start": 0.0, "stop": 6.283185307179586, "points": 1000 },
//!   "output":   { "path": "out.csv", "format": "csv" },
//!   "seed": 7
//! }
//! ```
//!
//! Every field is optional. `geometry` and `direct` are mutually exclusive.
//! In natural units only `geometry.refractive_index` is read and the transit
//! time `n d / c` is 1; SI units need all three geometry fields.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// `c / (n d) = 1`.
    #[default]
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Five traveling-wave rate equations.
    #[default]
    #[value(name = "traveling5")]
    Traveling5,
    /// Three single-mode rate equations.
    #[value(name = "single_mode", alias = "single-mode")]
    SingleMode,
    /// Closed equations for the total photon number under `J = -2 Delta`.
    #[value(name = "reduced_total", alias = "reduced-total")]
    ReducedTotal,
    /// Density matrix of the two traveling-wave modes.
    Lindblad,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySpec {
    pub length: Option<f64>,
    pub refractive_index: Option<f64>,
    pub light_speed: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectSpec {
    pub kappa: Option<f64>,
    pub coupling: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSpec {
    pub rabi: Option<f64>,
    pub omega0: Option<f64>,
    pub detuning: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    pub model: Option<Model>,
    pub duration: Option<f64>,
    pub dt: Option<f64>,
    pub stride: Option<usize>,
    pub n_max: Option<usize>,
    pub initial: Option<Vec<f64>>,
    pub allow_small_cutoff: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub units: Option<Units>,
    pub geometry: Option<GeometrySpec>,
    pub direct: Option<DirectSpec>,
    pub drive: DriveSpec,
    pub run: RunSpec,
    pub sweep: SweepSpec,
    pub output: OutputSpec,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON scenario file; flags override its fields
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the result here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub units: Option<Units>,
    /// Seed for randomised (fuzz) grids
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GeometryArgs {
    /// Refractive index of the slab
    #[arg(long = "n", value_name = "INDEX")]
    pub refractive_index: Option<f64>,
    /// Slab thickness (SI units only)
    #[arg(long)]
    pub length: Option<f64>,
    /// Vacuum light speed (SI units only)
    #[arg(long)]
    pub light_speed: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RateArgs {
    /// Cavity decay rate, bypassing the geometry
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Mirror coupling J, bypassing the geometry
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// Rabi frequency of the drive
    #[arg(long)]
    pub rabi: Option<f64>,
    /// Laser frequency (with a geometry)
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Detuning from the cavity resonance
    #[arg(long, allow_hyphen_values = true)]
    pub detuning: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep every STRIDE-th step
    #[arg(long)]
    pub stride: Option<usize>,
    /// Photon cutoff per mode for the density-matrix model
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Initial state, comma separated: n_L,n_R,k1,k2,k3 (or n,k1,k2)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub initial: Option<Vec<f64>>,
    /// Run the density-matrix model below the recommended cutoff
    #[arg(long)]
    pub allow_small_cutoff: bool,
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

impl ScenarioConfig {
    pub fn apply_global(&mut self, g: &GlobalArgs) {
        set(&mut self.output.path, g.out.clone());
        set(&mut self.output.format, g.format);
        set(&mut self.units, g.units);
        set(&mut self.seed, g.seed);
    }

    pub fn apply_geometry(&mut self, g: &GeometryArgs) {
        if g.refractive_index.is_some() || g.length.is_some() || g.light_speed.is_some() {
            let spec = self.geometry.get_or_insert_with(Default::default);
            set(&mut spec.refractive_index, g.refractive_index);
            set(&mut spec.length, g.length);
            set(&mut spec.light_speed, g.light_speed);
        }
    }

    pub fn apply_rates(&mut self, r: &RateArgs) {
        if r.kappa.is_some() || r.coupling.is_some() {
            let spec = self.direct.get_or_insert_with(Default::default);
            set(&mut spec.kappa, r.kappa);
            set(&mut spec.coupling, r.coupling);
        }
        set(&mut self.drive.rabi, r.rabi);
        set(&mut self.drive.omega0, r.omega0);
        set(&mut self.drive.detuning, r.detuning);
    }

    pub fn apply_sweep(&mut self, s: &SweepArgs) {
        set(&mut self.sweep.start, s.start);
        set(&mut self.sweep.stop, s.stop);
        set(&mut self.sweep.points, s.points);
    }

    pub fn apply_run(&mut self, r: &RunArgs) {
        set(&mut self.run.model, r.model);
        set(&mut self.run.duration, r.duration);
        set(&mut self.run.dt, r.dt);
        set(&mut self.run.stride, r.stride);
        set(&mut self.run.n_max, r.n_max);
        set(&mut self.run.initial, r.initial.clone());
        if r.allow_small_cutoff {
            self.run.allow_small_cutoff = Some(true);
        }
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }

    pub fn out(&self) -> Option<&Path> {
        self.output.path.as_deref()
    }
}

/// A sweep range with defaults filled in and checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn resolve(&self, default: Range) -> Result<Range, Failure> {
        let r = Range {
            start: self.start.unwrap_or(default.start),
            stop: self.stop.unwrap_or(default.stop),
            points: self.points.unwrap_or(default.points),
        };
        if r.points == 0 {
            return Err(Failure::usage("sweep needs at least one point"));
        }
        if !(r.start.is_finite() && r.stop.is_finite()) || (r.points > 1 && r.start >= r.stop) {
            return Err(Failure::usage(format!(
                "sweep range must be finite and increasing, got [{}, {}]",
                r.start, r.stop
            )));
        }
        Ok(r)
    }
}
