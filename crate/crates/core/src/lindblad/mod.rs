//! Density-matrix oracle for the cavity models on a truncated Fock space.
//!
//! Everything is in the interaction picture; the free-field Hamiltonian only
//! appears in [`single_photon_spectrum`].

mod density;
mod fock;
mod generator;
mod observables;

pub use density::{DensityMatrix, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL};
pub use fock::{build_space, FockSpace, Mode};
pub use generator::{
    evolve_density, evolve_density_fixed, interaction_hamiltonian, lindblad_rhs, single_mode_hamiltonian,
    single_mode_lindblad_rhs, InteractionHamiltonian, LindbladGenerator,
};
pub use observables::{
    expectations, recommended_cutoff, single_mode_expectations, single_photon_spectrum, Observables,
    SinglePhotonSpectrum, IMAGINARY_RESIDUE_TOL,
};
