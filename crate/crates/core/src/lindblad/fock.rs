use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{require, Error, Result};

/// Which ladder operator of a [`FockSpace`] to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Left-moving traveling-wave mode `a_L` (two-mode spaces).
    Left,
    /// Right-moving traveling-wave mode `a_R` (two-mode spaces).
    Right,
    /// The standing-wave mode `c` (single-mode spaces).
    Single,
}

/// Truncated Fock space of one or two bosonic modes.
///
/// Each mode holds at most `n_max` photons. Two-mode basis states
/// `|n_L, n_R>` are ordered lexicographically, i.e. index `n_L (n_max + 1) + n_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    n_max: usize,
    mode_count: usize,
    dimension: usize,
    annihilators: Vec<Array2<Complex64>>,
}

/// Single-mode annihilation operator with `sqrt(n)` on the superdiagonal.
fn ladder(n_max: usize) -> Array2<Complex64> {
    let d = n_max + 1;
    let mut a = Array2::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == Complex64::new(0.0, 0.0) {
            continue;
        }
        for ((k, l), &y) in b.indexed_iter() {
            out[[i * br + k, j * bc + l]] = x * y;
        }
    }
    out
}

pub(crate) fn dagger(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

pub fn build_space(n_max: usize, modes: usize) -> Result<FockSpace> {
    require(n_max >= 1, "n_max", n_max as f64, "photon cutoff must be at least 1")?;
    require(modes == 1 || modes == 2, "modes", modes as f64, "must be 1 or 2")?;

    let a = ladder(n_max);
    let annihilators = if modes == 1 {
        vec![a]
    } else {
        let id = Array2::eye(n_max + 1);
        vec![kron(&a, &id), kron(&id, &a)]
    };
    Ok(FockSpace { n_max, mode_count: modes, dimension: (n_max + 1).pow(modes as u32), annihilators })
}

impl FockSpace {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_two_mode(&self) -> bool {
        self.mode_count == 2
    }

    fn slot(&self, mode: Mode) -> Result<usize> {
        match (mode, self.mode_count) {
            (Mode::Single, 1) => Ok(0),
            (Mode::Left, 2) => Ok(0),
            (Mode::Right, 2) => Ok(1),
            (Mode::Single, _) => Err(Error::WrongSpace("standing-wave mode needs a single-mode space")),
            _ => Err(Error::WrongSpace("traveling-wave modes need a two-mode space")),
        }
    }

    pub fn annihilation(&self, mode: Mode) -> Result<&Array2<Complex64>> {
        Ok(&self.annihilators[self.slot(mode)?])
    }

    pub fn creation(&self, mode: Mode) -> Result<Array2<Complex64>> {
        Ok(dagger(self.annihilation(mode)?))
    }

    pub fn number(&self, mode: Mode) -> Result<Array2<Complex64>> {
        let a = self.annihilation(mode)?;
        Ok(dagger(a).dot(a))
    }

    /// All annihilation operators of the space, in mode order.
    pub fn annihilators(&self) -> &[Array2<Complex64>] {
        &self.annihilators
    }

    /// Basis index of the occupation numbers (one entry per mode).
    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.mode_count {
            return Err(Error::DimensionMismatch { expected: self.mode_count, found: occupations.len() });
        }
        occupations.iter().try_fold(0, |acc, &n| {
            require(n <= self.n_max, "occupation", n as f64, "exceeds the photon cutoff")?;
            Ok(acc * (self.n_max + 1) + n)
        })
    }
}
