use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::fock::FockSpace;
use crate::error::{Error, Result};
use crate::numerics::OdeState;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Density operator on a truncated Fock space, stamped with its time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: Array2<Complex64>,
    pub time: f64,
}

impl DensityMatrix {
    pub fn new(matrix: Array2<Complex64>) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, found: c });
        }
        Ok(Self { matrix, time: 0.0 })
    }

    /// The empty cavity `|0><0|`.
    pub fn vacuum(space: &FockSpace) -> Self {
        let d = space.dimension();
        let mut m = Array2::zeros((d, d));
        m[[0, 0]] = Complex64::new(1.0, 0.0);
        Self { matrix: m, time: 0.0 }
    }

    /// Projector onto a Fock state with the given occupation per mode.
    pub fn fock(space: &FockSpace, occupations: &[usize]) -> Result<Self> {
        let i = space.index(occupations)?;
        let d = space.dimension();
        let mut m = Array2::zeros((d, d));
        m[[i, i]] = Complex64::new(1.0, 0.0);
        Ok(Self { matrix: m, time: 0.0 })
    }

    /// `|psi><psi|` for a normalised state vector.
    pub fn pure(space: &FockSpace, psi: &Array1<Complex64>) -> Result<Self> {
        if psi.len() != space.dimension() {
            return Err(Error::DimensionMismatch { expected: space.dimension(), found: psi.len() });
        }
        let d = psi.len();
        let m = Array2::from_shape_fn((d, d), |(i, j)| psi[i] * psi[j].conj());
        Ok(Self { matrix: m, time: 0.0 })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diag().sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dimension();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Whether every eigenvalue of the Hermitian part is at least `-tol`.
    ///
    /// Runs a Cholesky factorisation of `rho + tol * I`, which succeeds
    /// exactly when that shifted matrix is positive definite.
    pub fn is_positive_within(&self, tol: f64) -> bool {
        let d = self.dimension();
        let mut l = vec![Complex64::new(0.0, 0.0); d * d];
        for j in 0..d {
            let mut diag = self.matrix[[j, j]].re + tol;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if diag <= 0.0 || !diag.is_finite() {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * d + j] = Complex64::new(ljj, 0.0);
            for i in j + 1..d {
                let herm = 0.5 * (self.matrix[[i, j]] + self.matrix[[j, i]].conj());
                let mut s = herm;
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = s / ljj;
            }
        }
        true
    }

    /// Checks Hermiticity, unit trace and positivity. Returns the name and
    /// size of the first violated invariant.
    pub fn check_invariants(&self) -> std::result::Result<(), (&'static str, f64)> {
        let herm = self.hermiticity_defect();
        if herm > HERMITICITY_TOL {
            return Err(("hermiticity defect", herm));
        }
        let tr = self.trace();
        let tr_err = (tr - Complex64::new(1.0, 0.0)).norm();
        if tr_err > TRACE_TOL {
            return Err(("trace error", tr_err));
        }
        if !self.is_positive_within(POSITIVITY_TOL) {
            return Err(("negative eigenvalue below", -POSITIVITY_TOL));
        }
        Ok(())
    }

    /// `Tr(op rho)`.
    pub fn expect(&self, op: &Array2<Complex64>) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = zero;
        for ((i, j), &a) in op.indexed_iter() {
            if a != zero {
                acc += a * self.matrix[[j, i]];
            }
        }
        acc
    }
}

impl OdeState for DensityMatrix {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.matrix.axpy(a, &x.matrix);
    }
    fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
    fn all_finite(&self) -> bool {
        self.matrix.all_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::build_space;

    #[test]
    fn vacuum_is_valid() {
        let s = build_space(3, 2).unwrap();
        let rho = DensityMatrix::vacuum(&s);
        assert!(rho.check_invariants().is_ok());
        assert_eq!(rho.trace(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn detects_negative_eigenvalue() {
        let m = ndarray::array![
            [Complex64::new(1.1, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-0.1, 0.0)]
        ];
        let rho = DensityMatrix::new(m).unwrap();
        assert!(!rho.is_positive_within(1e-10));
        assert_eq!(rho.check_invariants().unwrap_err().0, "negative eigenvalue below");
    }

    #[test]
    fn detects_bad_trace_and_hermiticity() {
        let s = build_space(1, 1).unwrap();
        let mut rho = DensityMatrix::vacuum(&s);
        rho.matrix[[0, 1]] = Complex64::new(0.0, 1e-6);
        assert_eq!(rho.check_invariants().unwrap_err().0, "hermiticity defect");
        let mut rho = DensityMatrix::vacuum(&s);
        rho.matrix[[1, 1]] = Complex64::new(1e-6, 0.0);
        assert_eq!(rho.check_invariants().unwrap_err().0, "trace error");
    }

    #[test]
    fn pure_state_is_rank_one_positive() {
        let s = build_space(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ndarray::array![Complex64::new(h, 0.0), Complex64::new(0.0, h), Complex64::new(0.0, 0.0)];
        let rho = DensityMatrix::pure(&s, &psi).unwrap();
        assert!(rho.check_invariants().is_ok());
        assert!(DensityMatrix::pure(&s, &ndarray::array![Complex64::new(1.0, 0.0)]).is_err());
    }
}
