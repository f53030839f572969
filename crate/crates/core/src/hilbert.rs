//! Truncated number-basis state space.
//!
//! The basis `|0>, |1>, ..., |N-1>` stands in for the infinite number basis.
//! Amplitudes are stored densely; desk-scale dimensions (N <= 2048) make a
//! sparse representation unnecessary.

use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `| ||a||^2 - 1 |` for a freshly constructed normalized state.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Tolerance on norm drift for states produced by time evolution.
pub const EVOLVED_NORMALIZATION_TOL: f64 = 1e-9;

/// A vector of complex amplitudes over the truncated number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    amps: Vec<Complex64>,
}

impl State {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::DimensionTooSmall(amps.len()));
        }
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// Equal-weight superposition `N^{-1/2} sum_x |x>`.
    pub fn uniform(dim: usize) -> Result<Self> {
        let a = 1.0 / (dim as f64).sqrt();
        Self::new(vec![Complex64::new(a, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> State {
        State {
            amps: self.amps.iter().map(|&a| a * factor).collect(),
        }
    }

    /// Returns `self / ||self||`, or an error for the zero vector.
    pub fn normalized(&self) -> Result<State> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub(crate) fn check_dim(&self, other: &State) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for State {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.amps[i]
    }
}

impl Add for &State {
    type Output = State;

    /// Panics on dimension mismatch.
    fn add(self, rhs: &State) -> State {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        State {
            amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &State {
    type Output = State;

    fn sub(self, rhs: &State) -> State {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        State {
            amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&State> for Complex64 {
    type Output = State;

    fn mul(self, rhs: &State) -> State {
        rhs.scale(self)
    }
}

/// The basis vector `|x>` in dimension `dim`.
pub fn make_basis_state(x: usize, dim: usize) -> Result<State> {
    if x >= dim {
        return Err(Error::OutOfRange { index: x, dim });
    }
    let mut s = State::zeros(dim)?;
    s.amps[x] = Complex64::new(1.0, 0.0);
    Ok(s)
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner(a: &State, b: &State) -> Result<Complex64> {
    a.check_dim(b)?;
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

pub fn norm(a: &State) -> f64 {
    a.norm()
}

/// `||a - b||` after checking dimensions.
pub fn distance(a: &State, b: &State) -> Result<f64> {
    a.check_dim(b)?;
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Multiplies `a` by the global phase that makes `<result|b>` real and
/// nonnegative. This phase minimizes `||e^{i theta} a - b||`.
pub fn phase_align(a: &State, b: &State) -> Result<State> {
    let ov = inner(a, b)?;
    let mag = ov.norm();
    if mag == 0.0 {
        return Err(Error::UndefinedPhase);
    }
    Ok(a.scale(ov / mag))
}

/// Probability weight on basis indices `x >= cutoff`.
pub fn tail_mass(a: &State, cutoff: usize) -> Result<f64> {
    if cutoff > a.dim() {
        return Err(Error::OutOfRange {
            index: cutoff,
            dim: a.dim(),
        });
    }
    Ok(a.amps[cutoff..].iter().map(|c| c.norm_sqr()).sum())
}

/// First index of the edge band used to monitor truncation: the top
/// `max(1, dim / 256)` basis states.
pub fn edge_cutoff(dim: usize) -> usize {
    dim - (dim / 256).max(1)
}
