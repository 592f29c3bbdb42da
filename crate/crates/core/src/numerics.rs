//! Shared numerical kernels.
//!
//! A single classical RK4 stepper drives every model in the crate: the
//! five-variable and three-variable rate equations as well as the
//! density-matrix master equations. States only need to implement
//! [`OdeState`], which is the flattened vector-space view the stepper works
//! with. The remaining kernels are a partial-pivot Gaussian elimination for
//! the small stationarity systems, a Jacobi eigensolver for small symmetric
//! matrices and a sine with argument reduction that returns exact zeros on
//! resonance.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require, Error, Result};

/// Vector-space operations the RK4 stepper needs from a state.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);

    /// Largest absolute component.
    fn max_abs(&self) -> f64;

    /// Largest absolute componentwise difference.
    fn max_abs_diff(&self, other: &Self) -> f64;

    fn all_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for Complex64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (y, xi) in self.iter_mut().zip(x) {
            *y += a * xi;
        }
    }
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for Array2<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.scaled_add(Complex64::new(a, 0.0), x);
    }
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other.iter()).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// Fixed-step integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepperConfig {
    /// Initial step; the convergence gate may halve it.
    pub dt: f64,
    pub max_steps: usize,
    /// Accept once successive final states differ by less than this
    /// (scaled by `max(1, |y|)`).
    pub convergence_tol: f64,
    pub halving_limit: usize,
    /// Record every `stride`-th step. The final step is always recorded.
    pub stride: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self { dt: 0.01, max_steps: 20_000_000, convergence_tol: 1e-10, halving_limit: 8, stride: 1 }
    }
}

impl StepperConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt, ..Self::default() }
    }

    /// Default step for a system whose fastest rate is `max_rate`:
    /// `0.01 / max(max_rate, 1)`.
    pub fn for_max_rate(max_rate: f64) -> Self {
        Self::with_dt(0.01 / max_rate.abs().max(1.0))
    }

    pub fn stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    fn validate(&self) -> Result<()> {
        require(self.dt > 0.0 && self.dt.is_finite(), "dt", self.dt, "must be positive and finite")?;
        require(self.halving_limit >= 1, "halving_limit", self.halving_limit as f64, "must be at least 1")?;
        require(self.stride >= 1, "stride", self.stride as f64, "must be at least 1")?;
        Ok(())
    }
}

/// Time-stamped sequence of states produced by an integrator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    /// Step actually used.
    pub dt: f64,
    /// Parameter snapshot of the run.
    pub metadata: Vec<(String, f64)>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &S {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory always holds the initial state")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    pub fn with_metadata<K: Into<String>>(mut self, entries: impl IntoIterator<Item = (K, f64)>) -> Self {
        self.metadata.extend(entries.into_iter().map(|(k, v)| (k.into(), v)));
        self
    }

    pub fn map<T>(self, f: impl FnMut(S) -> T) -> Trajectory<T> {
        Trajectory {
            times: self.times,
            states: self.states.into_iter().map(f).collect(),
            dt: self.dt,
            metadata: self.metadata,
        }
    }
}

/// One classical RK4 step of size `h`.
pub fn rk4_step<S, F>(rhs: &F, y: &S, h: f64) -> S
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    let k1 = rhs(y);
    let mut tmp = y.clone();
    tmp.axpy(0.5 * h, &k1);
    let k2 = rhs(&tmp);
    let mut tmp = y.clone();
    tmp.axpy(0.5 * h, &k2);
    let k3 = rhs(&tmp);
    let mut tmp = y.clone();
    tmp.axpy(h, &k3);
    let k4 = rhs(&tmp);

    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    out
}

/// Integrates `y' = rhs(y)` over `[0, duration]` with a fixed step no larger
/// than `dt`. The step is shrunk slightly so the grid lands on `duration`.
pub fn rk4_fixed<S, F>(rhs: F, y0: S, duration: f64, dt: f64, stride: usize, max_steps: usize) -> Result<Trajectory<S>>
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    require(duration >= 0.0 && duration.is_finite(), "duration", duration, "must be finite and non-negative")?;
    require(dt > 0.0 && dt.is_finite(), "dt", dt, "must be positive and finite")?;
    require(stride >= 1, "stride", stride as f64, "must be at least 1")?;
    if !y0.all_finite() {
        return Err(Error::NonFinite { step: 0, time: 0.0 });
    }

    if duration == 0.0 {
        return Ok(Trajectory { times: vec![0.0], states: vec![y0], dt, metadata: Vec::new() });
    }

    let ratio = duration / dt;
    let steps =
        if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) { ratio.round() } else { ratio.ceil() }.max(1.0);
    if steps > max_steps as f64 {
        return Err(Error::TooManySteps { required: steps.min(usize::MAX as f64) as usize, limit: max_steps });
    }
    let steps = steps as usize;
    let h = duration / steps as f64;

    let capacity = steps / stride + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    times.push(0.0);
    states.push(y0.clone());

    let mut y = y0;
    for step in 1..=steps {
        y = rk4_step(&rhs, &y, h);
        let t = if step == steps { duration } else { step as f64 * h };
        if !y.all_finite() {
            return Err(Error::NonFinite { step, time: t });
        }
        if step % stride == 0 || step == steps {
            times.push(t);
            states.push(y.clone());
        }
    }

    Ok(Trajectory { times, states, dt: h, metadata: Vec::new() })
}

/// RK4 with the halving convergence gate: the step is halved until two
/// successive runs agree on the final state to `cfg.convergence_tol`. The
/// finer of the two accepted runs is returned.
pub fn rk4_integrate<S, F>(rhs: F, y0: S, duration: f64, cfg: &StepperConfig) -> Result<Trajectory<S>>
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    cfg.validate()?;
    let mut dt = cfg.dt;
    let mut coarse = rk4_fixed(&rhs, y0.clone(), duration, dt, cfg.stride, cfg.max_steps)?;
    if duration == 0.0 {
        return Ok(coarse);
    }

    let mut change = f64::INFINITY;
    for _ in 0..cfg.halving_limit {
        dt *= 0.5;
        let fine = rk4_fixed(&rhs, y0.clone(), duration, dt, cfg.stride, cfg.max_steps)?;
        let a = coarse.final_state();
        let b = fine.final_state();
        change = a.max_abs_diff(b);
        if change <= cfg.convergence_tol * b.max_abs().max(1.0) {
            return Ok(fine);
        }
        coarse = fine;
    }

    Err(Error::NotConverged { halvings: cfg.halving_limit, dt, change, tolerance: cfg.convergence_tol })
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Intended for the small (k <= 16) stationarity systems. A pivot below
/// `1e-13 * max|a|` is reported as [`Error::Singular`].
#[allow(clippy::needless_range_loop)]
pub fn dense_solve<const K: usize>(a: [[f64; K]; K], b: [f64; K]) -> Result<[f64; K]> {
    let scale = a.iter().flat_map(|row| row.iter()).fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Singular { column: 0, pivot: 0.0 });
    }
    let threshold = 1e-13 * scale;

    let mut m = a;
    let mut x = b;
    for col in 0..K {
        let (pivot_row, pivot) =
            (col..K).map(|r| (r, m[r][col])).max_by(|p, q| p.1.abs().total_cmp(&q.1.abs())).expect("non-empty column");
        if pivot.abs() < threshold {
            return Err(Error::Singular { column: col, pivot });
        }
        m.swap(col, pivot_row);
        x.swap(col, pivot_row);

        for r in col + 1..K {
            let factor = m[r][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..K {
                m[r][c] -= factor * m[col][c];
            }
            x[r] -= factor * x[col];
        }
    }

    for col in (0..K).rev() {
        let tail: f64 = (col + 1..K).map(|c| m[col][c] * x[c]).sum();
        x[col] = (x[col] - tail) / m[col][col];
    }
    Ok(x)
}

/// Residual threshold below which the reduced phase counts as an exact
/// multiple of pi.
pub const RESONANCE_SNAP: f64 = 1e-12;

/// `sin(phi)` evaluated after reducing `phi` modulo pi.
///
/// Phases within [`RESONANCE_SNAP`] of a multiple of pi return exactly zero.
pub fn reduced_sin(phi: f64) -> f64 {
    if !phi.is_finite() {
        return f64::NAN;
    }
    let k = (phi / PI).round();
    let residual = phi - k * PI;
    if residual.abs() < RESONANCE_SNAP {
        return 0.0;
    }
    let s = residual.sin();
    if k.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// Eigen-decomposition of a small real symmetric matrix by cyclic Jacobi
/// rotations. Eigenvalues are returned in descending order; column `j` of the
/// returned matrix is the eigenvector of eigenvalue `j`.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigen<const K: usize>(a: [[f64; K]; K]) -> ([f64; K], [[f64; K]; K]) {
    let mut m = a;
    let mut v = [[0.0; K]; K];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _sweep in 0..64 {
        let off: f64 = (0..K)
            .flat_map(|i| (0..K).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off == 0.0 {
            break;
        }
        for p in 0..K {
            for q in p + 1..K {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..K {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..K {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..K).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let mut values = [0.0; K];
    let mut vectors = [[0.0; K]; K];
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = m[src][src];
        for k in 0..K {
            vectors[k][dst] = v[k][src];
        }
    }
    (values, vectors)
}

/// `n` evenly spaced points on `[start, stop]`, endpoints included.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { stop } else { start + step * i as f64 }).collect()
        }
    }
}
