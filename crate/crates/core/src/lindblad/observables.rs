use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use super::density::DensityMatrix;
use super::fock::{dagger, FockSpace, Mode};
use crate::error::{Error, Result};
use crate::numerics::symmetric_eigen;
use crate::parameters::TravelingWaveParams;
use crate::rates::{emission_rates, traveling_steady_state, EmissionRates, RateState5, SingleModeState};

/// Imaginary parts of expectations of Hermitian operators must stay below this.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-12;

/// The operators whose expectations make up the rate-equation state.
#[derive(Debug, Clone)]
pub struct Observables {
    dimension: usize,
    two_mode: bool,
    ops: Vec<Array2<Complex64>>,
}

impl Observables {
    /// Two-mode: `n_L, n_R, a_L + a_L^dag, i(a_R - a_R^dag), i(a_L a_R^dag - a_L^dag a_R)`.
    /// Single-mode: `n, c + c^dag, i(c - c^dag)`.
    pub fn new(space: &FockSpace) -> Result<Self> {
        let i = Complex64::new(0.0, 1.0);
        let ops = if space.is_two_mode() {
            let al = space.annihilation(Mode::Left)?;
            let ar = space.annihilation(Mode::Right)?;
            let (ald, ard) = (dagger(al), dagger(ar));
            vec![ald.dot(al), ard.dot(ar), al + &ald, (ar - &ard) * i, (al.dot(&ard) - ald.dot(ar)) * i]
        } else {
            let c = space.annihilation(Mode::Single)?;
            let cd = dagger(c);
            vec![cd.dot(c), c + &cd, (c - &cd) * i]
        };
        Ok(Self { dimension: space.dimension(), two_mode: space.is_two_mode(), ops })
    }

    fn evaluate(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dimension() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: rho.dimension() });
        }
        self.ops
            .iter()
            .map(|op| {
                let z = rho.expect(op);
                if z.im.abs() >= IMAGINARY_RESIDUE_TOL {
                    return Err(Error::InvariantViolation {
                        step: 0,
                        time: rho.time,
                        what: "imaginary expectation residue",
                        value: z.im.abs(),
                    });
                }
                Ok(z.re)
            })
            .collect()
    }

    pub fn traveling(&self, rho: &DensityMatrix, kappa: f64) -> Result<(RateState5, EmissionRates)> {
        if !self.two_mode {
            return Err(Error::WrongSpace("traveling-wave expectations need a two-mode space"));
        }
        let v = self.evaluate(rho)?;
        let s = RateState5::from_array([v[0], v[1], v[2], v[3], v[4]]);
        Ok((s, emission_rates(&s, kappa)))
    }

    /// Single-mode state and its emission rate `kappa n`.
    pub fn single_mode(&self, rho: &DensityMatrix, kappa: f64) -> Result<(SingleModeState, f64)> {
        if self.two_mode {
            return Err(Error::WrongSpace("single-mode expectations need a single-mode space"));
        }
        let v = self.evaluate(rho)?;
        Ok((SingleModeState { n: v[0], k1: v[1], k2: v[2] }, kappa * v[0]))
    }
}

/// Rate-equation variables and emission rates `I_A = kappa <n_A>` of a
/// two-mode density matrix. Build an [`Observables`] once when evaluating
/// many states.
pub fn expectations(rho: &DensityMatrix, space: &FockSpace, kappa: f64) -> Result<(RateState5, EmissionRates)> {
    Observables::new(space)?.traveling(rho, kappa)
}

pub fn single_mode_expectations(rho: &DensityMatrix, space: &FockSpace, kappa: f64) -> Result<(SingleModeState, f64)> {
    Observables::new(space)?.single_mode(rho, kappa)
}

/// One-photon eigenstates of `H_field + H_coup` for the traveling-wave pair.
///
/// Vectors hold the `(|1,0>, |0,1>)` components, i.e. `(L, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinglePhotonSpectrum {
    /// Energy of the symmetric standing wave `(|L> + |R>)/sqrt2`.
    pub plus: f64,
    /// Energy of the antisymmetric standing wave `(|L> - |R>)/sqrt2`.
    pub minus: f64,
    pub plus_vector: [f64; 2],
    pub minus_vector: [f64; 2],
}

impl SinglePhotonSpectrum {
    pub fn energies(&self) -> (f64, f64) {
        (self.plus, self.minus)
    }
}

/// Diagonalises the one-photon block of
/// `omega (a_L^dag a_L + a_R^dag a_R) + J/2 (a_L^dag a_R + a_R^dag a_L)`.
///
/// The block is read off the operator matrices rather than written down by
/// hand. Eigenvectors are sign-normalised so the `L` component is positive.
pub fn single_photon_spectrum(omega: f64, coupling: f64) -> SinglePhotonSpectrum {
    let space = super::fock::build_space(1, 2).expect("fixed valid space");
    let al = space.annihilation(Mode::Left).expect("two-mode");
    let ar = space.annihilation(Mode::Right).expect("two-mode");
    let (ald, ard) = (dagger(al), dagger(ar));
    let h = (ald.dot(al) + ard.dot(ar)) * Complex64::new(omega, 0.0)
        + (ald.dot(ar) + ard.dot(al)) * Complex64::new(0.5 * coupling, 0.0);

    let basis = [space.index(&[1, 0]).expect("in range"), space.index(&[0, 1]).expect("in range")];
    let mut block = [[0.0; 2]; 2];
    for (r, &i) in basis.iter().enumerate() {
        for (c, &j) in basis.iter().enumerate() {
            block[r][c] = h[[i, j]].re;
        }
    }

    let h = std::f64::consts::FRAC_1_SQRT_2;
    if block[0][1] == 0.0 {
        // Degenerate: any basis diagonalises, so report the standing waves.
        return SinglePhotonSpectrum {
            plus: block[0][0],
            minus: block[1][1],
            plus_vector: [h, h],
            minus_vector: [h, -h],
        };
    }

    let (values, vectors) = symmetric_eigen(block);
    let column = |k: usize| {
        let v = [vectors[0][k], vectors[1][k]];
        if v[0] < 0.0 {
            [-v[0], -v[1]]
        } else {
            v
        }
    };
    let (v0, v1) = (column(0), column(1));
    // The symmetric vector has components of equal sign.
    let (plus, minus) = if v0[0] * v0[1] > 0.0 { (0, 1) } else { (1, 0) };
    SinglePhotonSpectrum {
        plus: values[plus],
        minus: values[minus],
        plus_vector: if plus == 0 { v0 } else { v1 },
        minus_vector: if minus == 0 { v0 } else { v1 },
    }
}

/// Photon cutoff `ceil(mu + 6 sqrt(max(mu, 1)) + 4)` with `mu` the larger
/// stationary mode population.
pub fn recommended_cutoff(p: &TravelingWaveParams) -> Result<usize> {
    let ss = traveling_steady_state(p)?;
    let mu = ss.n_left.max(ss.n_right);
    Ok((mu + 6.0 * mu.max(1.0).sqrt() + 4.0).ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::build_space;
    use ndarray::Array1;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_and_fock_expectations() {
        let s = build_space(3, 2).unwrap();
        let (st, rates) = expectations(&DensityMatrix::vacuum(&s), &s, 1.0).unwrap();
        assert_eq!(st, RateState5::VACUUM);
        assert_eq!(rates.total, 0.0);

        let (st, rates) = expectations(&DensityMatrix::fock(&s, &[1, 0]).unwrap(), &s, 0.5).unwrap();
        assert_eq!(st, RateState5::from_array([1.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!((rates.left, rates.right), (0.5, 0.0));
    }

    #[test]
    fn quadrature_sign_convention() {
        let s = build_space(1, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r1 = s.index(&[0, 1]).unwrap();
        for (phase, k2) in [(1.0, -1.0), (-1.0, 1.0)] {
            let mut psi = Array1::zeros(4);
            psi[0] = c(h, 0.0);
            psi[r1] = c(0.0, phase * h);
            let rho = DensityMatrix::pure(&s, &psi).unwrap();
            let (st, _) = expectations(&rho, &s, 1.0).unwrap();
            assert!((st.k2 - k2).abs() < 1e-15, "phase {phase}");
            assert!(st.k1.abs() < 1e-15);
        }

        let s1 = build_space(1, 1).unwrap();
        let psi = ndarray::array![c(h, 0.0), c(h, 0.0)];
        let (st, _) = single_mode_expectations(&DensityMatrix::pure(&s1, &psi).unwrap(), &s1, 1.0).unwrap();
        assert!((st.k1 - 1.0).abs() < 1e-15);
        assert!((st.n - 0.5).abs() < 1e-15);
    }

    #[test]
    fn expectations_reject_mismatch() {
        let s = build_space(2, 2).unwrap();
        let other = build_space(3, 2).unwrap();
        assert!(expectations(&DensityMatrix::vacuum(&other), &s, 1.0).is_err());
        assert!(single_mode_expectations(&DensityMatrix::vacuum(&s), &s, 1.0).is_err());
        let mut rho = DensityMatrix::vacuum(&s);
        rho.matrix[[1, 0]] = c(1e-3, 0.0);
        assert!(matches!(expectations(&rho, &s, 1.0), Err(Error::InvariantViolation { .. })));
    }

    #[test]
    fn spectrum_examples() {
        let sp = single_photon_spectrum(1.0, 0.0);
        assert_eq!(sp.energies(), (1.0, 1.0));

        let sp = single_photon_spectrum(1.0, 0.4);
        assert!((sp.plus - 1.2).abs() < 1e-12);
        assert!((sp.minus - 0.8).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sp.plus_vector[0] - h).abs() < 1e-12 && (sp.plus_vector[1] - h).abs() < 1e-12);
        assert!((sp.minus_vector[0] - h).abs() < 1e-12 && (sp.minus_vector[1] + h).abs() < 1e-12);

        // Negative coupling puts the symmetric wave below the antisymmetric one.
        let sp = single_photon_spectrum(2.0, -0.6);
        assert!((sp.plus - 1.7).abs() < 1e-12);
        assert!((sp.minus - 2.3).abs() < 1e-12);
    }

    #[test]
    fn cutoff_heuristic() {
        let weak = TravelingWaveParams::new(1.0, 0.0, 0.2).unwrap();
        assert_eq!(recommended_cutoff(&weak).unwrap(), 11);
        // Omega = 4, kappa = 1, J = 0: n_R = 16, 16 + 24 + 4 = 44.
        let strong = TravelingWaveParams::new(1.0, 0.0, 4.0).unwrap();
        assert_eq!(recommended_cutoff(&strong).unwrap(), 44);
    }
}
