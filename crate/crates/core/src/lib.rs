//! Models of a laser-driven optical cavity with two partially transparent
//! mirrors.
//!
//! * [`classical`]: Fabry-Perot scattering of a dielectric slab.
//! * [`parameters`]: decay rate `kappa` and mirror coupling `J` from the slab.
//! * [`rates`]: rate equations of the traveling-wave and single-mode models.
//! * [`lindblad`]: density-matrix evolution used as an independent oracle.
//! * [`consistency`]: cross-checks between the three descriptions.
//!
//! Units have `hbar = 1`; rates and frequencies share one time unit.

pub mod classical;
pub mod consistency;
pub mod error;
pub mod lindblad;
pub mod numerics;
pub mod parameters;
pub mod rates;

pub use classical::{CavityGeometry, FresnelSet, MirrorCavity, Resonator, ScatteringAmplitudes, ScatteringRates};
pub use consistency::ConsistencyReport;
pub use error::{Error, Result};
pub use lindblad::{DensityMatrix, FockSpace, InteractionHamiltonian, LindbladGenerator, Mode};
pub use numerics::{StepperConfig, Trajectory};
pub use parameters::{ResonanceLadder, TravelingWaveParams};
pub use rates::{EmissionRates, RateState5, SingleModeState};
