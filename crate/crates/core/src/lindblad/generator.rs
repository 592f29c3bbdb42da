use ndarray::Array2;
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::fock::{dagger, FockSpace, Mode};
use crate::error::{require, Error, Result};
use crate::numerics::{rk4_fixed, rk4_integrate, StepperConfig, Trajectory};

/// Interaction-picture Hamiltonian of the driven traveling-wave cavity,
/// `H_I = Omega/2 (a_R + a_R^dag) + J/2 (a_L^dag a_R + a_R^dag a_L)` with
/// `hbar = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionHamiltonian {
    pub matrix: Array2<Complex64>,
    pub rabi: f64,
    pub coupling: f64,
}

pub fn interaction_hamiltonian(space: &FockSpace, rabi: f64, coupling: f64) -> Result<InteractionHamiltonian> {
    if !space.is_two_mode() {
        return Err(Error::WrongSpace("the traveling-wave Hamiltonian needs a two-mode space"));
    }
    let al = space.annihilation(Mode::Left)?;
    let ar = space.annihilation(Mode::Right)?;
    let hop = dagger(al).dot(ar);
    let drive = ar + &dagger(ar);
    let matrix = drive * Complex64::new(0.5 * rabi, 0.0) + (&hop + &dagger(&hop)) * Complex64::new(0.5 * coupling, 0.0);
    Ok(InteractionHamiltonian { matrix, rabi, coupling })
}

/// Single standing-wave mode driven off resonance,
/// `H_I = Omega/2 (c + c^dag) + Delta c^dag c`.
pub fn single_mode_hamiltonian(space: &FockSpace, rabi: f64, detuning: f64) -> Result<Array2<Complex64>> {
    let c = space.annihilation(Mode::Single)?;
    let cd = dagger(c);
    Ok((c + &cd) * Complex64::new(0.5 * rabi, 0.0) + cd.dot(c) * Complex64::new(detuning, 0.0))
}

type Entries = Vec<(usize, usize, Complex64)>;

fn nonzeros(m: &Array2<Complex64>) -> Entries {
    m.indexed_iter().filter(|(_, z)| z.norm_sqr() != 0.0).map(|((i, j), &z)| (i, j, z)).collect()
}

/// Lindblad generator `rho -> -i[H, rho] + kappa sum_A (a rho a^dag - {a^dag a, rho}/2)`
/// with equal decay rate on every channel.
///
/// The operators are dense matrices, but only their nonzero entries are
/// visited when the generator is applied; ladder operators and the
/// Hamiltonians here have O(dim) of them.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    dimension: usize,
    kappa: f64,
    /// `K = H - i kappa/2 sum_A a_A^dag a_A`
    effective: Entries,
    jumps: Vec<Entries>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: &Array2<Complex64>, jumps: &[Array2<Complex64>], kappa: f64) -> Result<Self> {
        require(kappa >= 0.0 && kappa.is_finite(), "kappa", kappa, "must be finite and non-negative")?;
        let d = hamiltonian.nrows();
        if hamiltonian.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: hamiltonian.ncols() });
        }
        let mut effective = hamiltonian.clone();
        for a in jumps {
            if a.dim() != (d, d) {
                return Err(Error::DimensionMismatch { expected: d, found: a.nrows() });
            }
            effective.scaled_add(Complex64::new(0.0, -0.5 * kappa), &dagger(a).dot(a));
        }
        Ok(Self { dimension: d, kappa, effective: nonzeros(&effective), jumps: jumps.iter().map(nonzeros).collect() })
    }

    /// Traveling-wave master equation: both mirrors leak at `kappa`.
    pub fn traveling(space: &FockSpace, h: &InteractionHamiltonian, kappa: f64) -> Result<Self> {
        if !space.is_two_mode() {
            return Err(Error::WrongSpace("the traveling-wave master equation needs a two-mode space"));
        }
        if h.matrix.nrows() != space.dimension() {
            return Err(Error::DimensionMismatch { expected: space.dimension(), found: h.matrix.nrows() });
        }
        Self::new(&h.matrix, space.annihilators(), kappa)
    }

    /// Single-mode master equation.
    pub fn single_mode(space: &FockSpace, rabi: f64, detuning: f64, kappa: f64) -> Result<Self> {
        if space.is_two_mode() {
            return Err(Error::WrongSpace("the single-mode master equation needs a single-mode space"));
        }
        let h = single_mode_hamiltonian(space, rabi, detuning)?;
        Self::new(&h, space.annihilators(), kappa)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `d rho / dt` for the given `rho`.
    pub fn apply(&self, rho: &Array2<Complex64>) -> Result<Array2<Complex64>> {
        let d = self.dimension;
        if rho.dim() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
        }
        Ok(self.apply_unchecked(rho))
    }

    fn apply_unchecked(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let d = self.dimension;
        let rho = rho.as_standard_layout();
        let r = rho.as_slice().expect("standard layout");
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        let minus_i = Complex64::new(0.0, -1.0);

        // -i K rho
        for &(i, k, v) in &self.effective {
            let w = minus_i * v;
            let src = &r[k * d..(k + 1) * d];
            let dst = &mut out[i * d..(i + 1) * d];
            for (o, s) in dst.iter_mut().zip(src) {
                *o += w * s;
            }
        }
        // +i rho K^dag, with (rho K^dag)_{ij} = sum_k rho_ik conj(K_jk)
        for &(j, k, v) in &self.effective {
            let w = Complex64::new(0.0, 1.0) * v.conj();
            for i in 0..d {
                out[i * d + j] += w * r[i * d + k];
            }
        }
        // kappa a rho a^dag
        for jump in &self.jumps {
            for &(i, k, v) in jump {
                for &(j, l, w) in jump {
                    out[i * d + j] += self.kappa * v * w.conj() * r[k * d + l];
                }
            }
        }
        Array2::from_shape_vec((d, d), out).expect("square buffer")
    }

    fn rhs(&self) -> impl Fn(&DensityMatrix) -> DensityMatrix + '_ {
        move |rho| DensityMatrix { matrix: self.apply_unchecked(&rho.matrix), time: rho.time }
    }
}

/// Right-hand side of the traveling-wave master equation.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    h: &InteractionHamiltonian,
    space: &FockSpace,
    kappa: f64,
) -> Result<Array2<Complex64>> {
    LindbladGenerator::traveling(space, h, kappa)?.apply(&rho.matrix)
}

/// Right-hand side of the single-mode master equation.
pub fn single_mode_lindblad_rhs(
    rho: &DensityMatrix,
    space: &FockSpace,
    rabi: f64,
    detuning: f64,
    kappa: f64,
) -> Result<Array2<Complex64>> {
    LindbladGenerator::single_mode(space, rabi, detuning, kappa)?.apply(&rho.matrix)
}

fn finish(traj: Trajectory<DensityMatrix>) -> Result<Trajectory<DensityMatrix>> {
    let mut traj = traj;
    for (step, (t, rho)) in traj.times.iter().zip(traj.states.iter_mut()).enumerate() {
        rho.time = *t;
        if let Err((what, value)) = rho.check_invariants() {
            return Err(Error::InvariantViolation { step, time: *t, what, value });
        }
    }
    Ok(traj)
}

fn check_initial(rho0: &DensityMatrix, generator: &LindbladGenerator) -> Result<()> {
    if rho0.dimension() != generator.dimension() {
        return Err(Error::DimensionMismatch { expected: generator.dimension(), found: rho0.dimension() });
    }
    Ok(())
}

/// RK4 evolution of a density matrix with the halving convergence gate.
/// Every stored state is checked for Hermiticity, unit trace and positivity.
pub fn evolve_density(
    rho0: DensityMatrix,
    generator: &LindbladGenerator,
    duration: f64,
    cfg: &StepperConfig,
) -> Result<Trajectory<DensityMatrix>> {
    check_initial(&rho0, generator)?;
    finish(rk4_integrate(generator.rhs(), rho0, duration, cfg)?)
}

/// Like [`evolve_density`] but on an exact fixed step, without the gate.
pub fn evolve_density_fixed(
    rho0: DensityMatrix,
    generator: &LindbladGenerator,
    duration: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory<DensityMatrix>> {
    check_initial(&rho0, generator)?;
    finish(rk4_fixed(generator.rhs(), rho0, duration, dt, stride, usize::MAX)?)
}
