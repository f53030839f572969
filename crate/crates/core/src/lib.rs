//! Simulator for adiabatic ground-state search over a truncated number basis.
//!
//! The problem Hamiltonian is diagonal, `H_P |x> = P(x) |x>`, and the search
//! interpolates `H(t) = (1 - t/T) H_I + (t/T) H_P` from the known ground state
//! of an initial Hamiltonian `H_I`. The [`analysis`] module compares that
//! evolution with the reference evolution under `(1 - t/T) H_I` alone and
//! checks the resulting bound `||g(T) - g_0(T)|| <= T ||H_P g_I||`.

// Link the LAPACK/BLAS backend.
extern crate lapack_src;
extern crate openblas_src;

pub mod analysis;
pub mod config;
pub mod error;
pub mod evolve;
pub mod hamiltonian;
pub mod hilbert;
pub mod sweep;

pub use error::{Error, Result};
pub use evolve::eigen::{ground_state_of, GroundState};
pub use evolve::{propagate, propagate_reference, StepControl, Trajectory};
pub use hamiltonian::{
    apply_hp, build_hi, delta_potential, interpolate, poly_potential, shift_potential, InitialHamiltonian,
    InitialKind, Operator, Params, Potential, Schedule, Variant,
};
pub use hilbert::{inner, make_basis_state, norm, phase_align, tail_mass, State};
