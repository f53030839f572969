//! Problem potentials, initial Hamiltonians and the interpolating schedules.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::evolve::eigen::{ground_state_of, hermiticity_error};
use crate::hilbert::{edge_cutoff, tail_mass, State};

/// Ground-state weight in the edge band above which a truncation warning is
/// raised.
pub const TRUNCATION_WARN_MASS: f64 = 1e-6;

/// How a potential table was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    /// `-1` at `x_min`, `0` elsewhere.
    Delta { x_min: usize },
    Polynomial { coefficients: Vec<f64> },
    Table,
}

/// A real function `P(x)` tabulated over `x = 0..dim`. It defines the
/// diagonal problem Hamiltonian `H_P |x> = P(x) |x>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    values: Vec<f64>,
    kind: PotentialKind,
    shift: f64,
    label: String,
}

impl Potential {
    pub fn from_values(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::DimensionTooSmall(values.len()));
        }
        if let Some(x) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values".into(),
                reason: format!("P({x}) is not finite"),
            });
        }
        Ok(Self {
            values,
            kind: PotentialKind::Table,
            shift: 0.0,
            label: label.into(),
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::from_values(vec![0.0; dim], "zero")
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Total constant added by [`shift_potential`].
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The marked site of an unshifted delta potential.
    pub fn delta_site(&self) -> Option<usize> {
        match self.kind {
            PotentialKind::Delta { x_min } if self.shift == 0.0 => Some(x_min),
            _ => None,
        }
    }
}

/// `P(x) = -1` at `x_min`, `0` elsewhere.
pub fn delta_potential(x_min: usize, dim: usize) -> Result<Potential> {
    if x_min >= dim {
        return Err(Error::OutOfRange { index: x_min, dim });
    }
    let mut values = vec![0.0; dim];
    values[x_min] = -1.0;
    let mut p = Potential::from_values(values, format!("delta(x_min={x_min})"))?;
    p.kind = PotentialKind::Delta { x_min };
    Ok(p)
}

/// `P(x) = sum_k c_k x^k` tabulated for `x = 0..dim` (Horner evaluation).
pub fn poly_potential(coefficients: &[f64], dim: usize) -> Result<Potential> {
    if coefficients.is_empty() {
        return Err(Error::InvalidParameter {
            name: "coefficients".into(),
            reason: "need at least one coefficient".into(),
        });
    }
    let values = (0..dim)
        .map(|x| {
            let x = x as f64;
            coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
        })
        .collect();
    let mut p = Potential::from_values(values, format!("poly({coefficients:?})"))?;
    p.kind = PotentialKind::Polynomial {
        coefficients: coefficients.to_vec(),
    };
    Ok(p)
}

/// `P(x) + c`.
pub fn shift_potential(p: &Potential, c: f64) -> Potential {
    let mut out = p.clone();
    if c != 0.0 {
        out.values.iter_mut().for_each(|v| *v += c);
        out.shift += c;
        out.label = format!("{}{:+}", p.label, c);
    }
    out
}

/// `H_P |s>`: pointwise product of `P` with the amplitudes.
pub fn apply_hp(p: &Potential, s: &State) -> Result<State> {
    if p.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: s.dim(),
        });
    }
    State::new(
        s.amplitudes()
            .iter()
            .zip(&p.values)
            .map(|(a, &v)| a * v)
            .collect(),
    )
}

/// A Hermitian operator on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    /// Real symmetric tridiagonal matrix; `off[i]` couples `i` and `i + 1`.
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
    /// Dense complex matrix, expected Hermitian.
    Dense(DMatrix<Complex64>),
}

impl Operator {
    pub fn diagonal(values: &[f64]) -> Self {
        Operator::Tridiagonal {
            diag: values.to_vec(),
            off: vec![0.0; values.len().saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Tridiagonal { diag, .. } => diag.len(),
            Operator::Dense(m) => m.nrows(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match self {
            Operator::Tridiagonal { diag, off } => {
                let n = diag.len();
                let mut m = DMatrix::zeros(n, n);
                for (i, &d) in diag.iter().enumerate() {
                    m[(i, i)] = Complex64::new(d, 0.0);
                }
                for (i, &e) in off.iter().enumerate() {
                    m[(i, i + 1)] = Complex64::new(e, 0.0);
                    m[(i + 1, i)] = Complex64::new(e, 0.0);
                }
                m
            }
            Operator::Dense(m) => m.clone(),
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        match self {
            Operator::Tridiagonal { .. } => 0.0,
            Operator::Dense(m) => hermiticity_error(m),
        }
    }

    /// `a * self + b * diag(values)`.
    pub fn affine(&self, a: f64, b: f64, values: &[f64]) -> Operator {
        assert_eq!(values.len(), self.dim(), "dimension mismatch");
        match self {
            Operator::Tridiagonal { diag, off } => Operator::Tridiagonal {
                diag: diag.iter().zip(values).map(|(d, v)| a * d + b * v).collect(),
                off: off.iter().map(|e| a * e).collect(),
            },
            Operator::Dense(m) => {
                let mut out = m * Complex64::new(a, 0.0);
                for (i, v) in values.iter().enumerate() {
                    out[(i, i)] += Complex64::new(b * v, 0.0);
                }
                Operator::Dense(out)
            }
        }
    }

    pub fn scaled(&self, a: f64) -> Operator {
        match self {
            Operator::Tridiagonal { diag, off } => Operator::Tridiagonal {
                diag: diag.iter().map(|d| a * d).collect(),
                off: off.iter().map(|e| a * e).collect(),
            },
            Operator::Dense(m) => Operator::Dense(m * Complex64::new(a, 0.0)),
        }
    }

    pub fn apply(&self, s: &State) -> Result<State> {
        if s.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: s.dim(),
            });
        }
        let a = s.amplitudes();
        let out = match self {
            Operator::Tridiagonal { diag, off } => {
                let mut out: Vec<Complex64> = a.iter().zip(diag).map(|(x, d)| x * d).collect();
                for (i, &e) in off.iter().enumerate() {
                    out[i] += a[i + 1] * e;
                    out[i + 1] += a[i] * e;
                }
                out
            }
            Operator::Dense(m) => {
                let v = nalgebra::DVector::from_column_slice(a);
                (m * v).as_slice().to_vec()
            }
        };
        State::new(out)
    }

    /// Largest absolute row sum; an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        match self {
            Operator::Tridiagonal { diag, off } => (0..diag.len())
                .map(|i| {
                    let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
                    let right = off.get(i).map_or(0.0, |e| e.abs());
                    diag[i].abs() + left + right
                })
                .fold(0.0, f64::max),
            Operator::Dense(m) => m
                .row_iter()
                .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }
}

/// Families of initial Hamiltonians.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InitialKind {
    /// Tridiagonal nearest-neighbour hopping with amplitude `-kappa`.
    Hopping,
    /// `(a^dagger - alpha)(a - alpha)` on the truncated number basis.
    CoherentLike,
    /// `diag(0, 1, 2, ...)`; commutes with every problem Hamiltonian.
    Diagonal,
    /// Gaussian Hermitian ensemble drawn from a seed.
    Random,
}

impl InitialKind {
    pub const ALL: [InitialKind; 4] = [
        InitialKind::Hopping,
        InitialKind::CoherentLike,
        InitialKind::Diagonal,
        InitialKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InitialKind::Hopping => "hopping",
            InitialKind::CoherentLike => "coherent-like",
            InitialKind::Diagonal => "diagonal",
            InitialKind::Random => "random",
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            InitialKind::Hopping => &["kappa"],
            InitialKind::CoherentLike => &["alpha"],
            InitialKind::Diagonal => &[],
            InitialKind::Random => &["scale"],
        }
    }
}

impl fmt::Display for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hopping" => Ok(InitialKind::Hopping),
            "coherent-like" | "coherent" => Ok(InitialKind::CoherentLike),
            "diagonal" => Ok(InitialKind::Diagonal),
            "random" | "seeded-random-hermitian" => Ok(InitialKind::Random),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// Named real parameters for [`build_hi`].
pub type Params = BTreeMap<String, f64>;

/// An initial Hamiltonian together with its ground eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialHamiltonian {
    pub kind: InitialKind,
    pub matrix: Operator,
    pub ground_state: State,
    pub ground_energy: f64,
    pub ground_gap: f64,
    pub degenerate: bool,
    /// Ground-state weight in the edge band (see [`edge_cutoff`]).
    pub ground_tail_mass: f64,
}

impl InitialHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn truncation_warning(&self) -> bool {
        self.ground_tail_mass >= TRUNCATION_WARN_MASS
    }

    /// Wraps an arbitrary Hermitian operator.
    pub fn from_operator(kind: InitialKind, matrix: Operator) -> Result<Self> {
        if matrix.dim() < 2 {
            return Err(Error::DimensionTooSmall(matrix.dim()));
        }
        let g = ground_state_of(&matrix)?;
        let ground_tail_mass = tail_mass(&g.state, edge_cutoff(matrix.dim()))?;
        Ok(Self {
            kind,
            matrix,
            ground_state: g.state,
            ground_energy: g.energy,
            ground_gap: g.gap,
            degenerate: g.degenerate,
            ground_tail_mass,
        })
    }
}

fn param(params: &Params, name: &str, default: f64) -> Result<f64> {
    let v = params.get(name).copied().unwrap_or(default);
    if !v.is_finite() {
        return Err(Error::InvalidParameter {
            name: name.into(),
            reason: "must be finite".into(),
        });
    }
    Ok(v)
}

/// Builds an initial Hamiltonian of the given kind.
///
/// Parameters: `kappa` (hopping, default 1, must be > 0), `alpha`
/// (coherent-like, default 1), `scale` (random, default 1, must be > 0).
/// The seed only affects the random kind.
pub fn build_hi(kind: InitialKind, params: &Params, dim: usize, seed: u64) -> Result<InitialHamiltonian> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    if let Some(k) = params.keys().find(|k| !kind.allowed_params().contains(&k.as_str())) {
        return Err(Error::InvalidParameter {
            name: k.clone(),
            reason: format!("not a parameter of the {kind} kind"),
        });
    }
    let matrix = match kind {
        InitialKind::Hopping => {
            let kappa = param(params, "kappa", 1.0)?;
            if kappa <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "kappa".into(),
                    reason: format!("must be positive, got {kappa}"),
                });
            }
            Operator::Tridiagonal {
                diag: vec![0.0; dim],
                off: vec![-kappa; dim - 1],
            }
        }
        InitialKind::CoherentLike => {
            let alpha = param(params, "alpha", 1.0)?;
            // a^dagger a - alpha (a + a^dagger) + alpha^2 with a|x> = sqrt(x)|x-1>
            Operator::Tridiagonal {
                diag: (0..dim).map(|x| x as f64 + alpha * alpha).collect(),
                off: (1..dim).map(|x| -alpha * (x as f64).sqrt()).collect(),
            }
        }
        InitialKind::Diagonal => Operator::diagonal(&(0..dim).map(|x| x as f64).collect::<Vec<_>>()),
        InitialKind::Random => {
            let scale = param(params, "scale", 1.0)?;
            if scale <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "scale".into(),
                    reason: format!("must be positive, got {scale}"),
                });
            }
            random_hermitian(dim, scale, seed)
        }
    };
    let mut hi = InitialHamiltonian::from_operator(kind, matrix)?;
    if kind == InitialKind::Random {
        // shift so the ground energy is exactly zero
        let e0 = hi.ground_energy;
        let n = hi.dim();
        hi.matrix = hi.matrix.affine(1.0, -e0, &vec![1.0; n]);
        let regrounded = InitialHamiltonian::from_operator(kind, hi.matrix)?;
        hi = InitialHamiltonian {
            ground_energy: 0.0,
            ..regrounded
        };
    }
    Ok(hi)
}

/// `scale * (A + A^dagger) / (2 sqrt(dim))` with i.i.d. standard complex
/// Gaussian entries in `A`; the spectrum fills roughly `[-2, 2] * scale`.
fn random_hermitian(dim: usize, scale: f64, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            a[(i, j)] = Complex64::new(re, im);
        }
    }
    let norm = scale / (2.0 * (dim as f64).sqrt());
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..=j {
            let v = (a[(i, j)] + a[(j, i)].conj()) * norm;
            if i == j {
                h[(i, i)] = Complex64::new(v.re, 0.0);
            } else {
                h[(i, j)] = v;
                h[(j, i)] = v.conj();
            }
        }
    }
    Operator::Dense(h)
}

/// Which time-dependent Hamiltonian a schedule produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `(1 - t/T) H_I + (t/T) H_P`.
    Full,
    /// `(1 - t/T) H_I`.
    Reference,
}

/// Linear interpolation between `H_I` and `H_P` over `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub initial: InitialHamiltonian,
    pub potential: Potential,
    pub total_time: f64,
    pub variant: Variant,
}

impl Schedule {
    pub fn new(
        initial: InitialHamiltonian,
        potential: Potential,
        total_time: f64,
        variant: Variant,
    ) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "total_time".into(),
                reason: format!("must be positive and finite, got {total_time}"),
            });
        }
        if initial.dim() != potential.dim() {
            return Err(Error::DimensionMismatch {
                left: initial.dim(),
                right: potential.dim(),
            });
        }
        Ok(Self {
            initial,
            potential,
            total_time,
            variant,
        })
    }

    pub fn full(initial: InitialHamiltonian, potential: Potential, total_time: f64) -> Result<Self> {
        Self::new(initial, potential, total_time, Variant::Full)
    }

    pub fn reference(initial: InitialHamiltonian, potential: Potential, total_time: f64) -> Result<Self> {
        Self::new(initial, potential, total_time, Variant::Reference)
    }

    /// The same schedule with the other variant.
    pub fn with_variant(&self, variant: Variant) -> Schedule {
        Schedule {
            variant,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// Hamiltonian at fraction `s = t/T`, without range checks.
    pub(crate) fn at_fraction(&self, s: f64) -> Operator {
        match self.variant {
            Variant::Full => self.initial.matrix.affine(1.0 - s, s, self.potential.values()),
            Variant::Reference => self.initial.matrix.scaled(1.0 - s),
        }
    }
}

/// The schedule's Hamiltonian at time `t`.
pub fn interpolate(sch: &Schedule, t: f64) -> Result<Operator> {
    if !(0.0..=sch.total_time).contains(&t) {
        return Err(Error::TimeOutOfRange {
            t,
            total: sch.total_time,
        });
    }
    Ok(sch.at_fraction(t / sch.total_time))
}
