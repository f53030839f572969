//! Time integration of `d/dt |g(t)> = -i H(t) |g(t)>`.
//!
//! Each step applies the exact exponential of the midpoint Hamiltonian,
//! `exp(-i H(t + dt/2) dt)`, obtained from its eigendecomposition. Every step
//! is unitary up to rounding, and the rule is second order in `dt`.

pub mod eigen;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{Operator, Schedule, Variant};
use crate::hilbert::{distance, inner, phase_align, State, EVOLVED_NORMALIZATION_TOL, NORMALIZATION_TOL};

use eigen::eigh;

/// Fixed-step integration settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// Largest allowed step; the actual step is `T / ceil(T / base_step)`.
    pub base_step: f64,
    /// Store every `sample_stride`-th step (the final step is always stored).
    pub sample_stride: usize,
    /// Tolerance for the reference-evolution checks.
    pub tolerance: f64,
}

impl StepControl {
    pub fn new(base_step: f64, sample_stride: usize) -> Self {
        Self {
            base_step,
            sample_stride,
            tolerance: 1e-9,
        }
    }

    pub fn validate(&self, total_time: f64) -> Result<()> {
        if !(self.base_step > 0.0 && self.base_step.is_finite()) {
            return Err(Error::StepControl(format!(
                "base_step must be positive, got {}",
                self.base_step
            )));
        }
        // small relative slack so that dt = T/10 computed in floating point passes
        if self.base_step > total_time / 10.0 * (1.0 + 1e-12) {
            return Err(Error::StepControl(format!(
                "base_step {} exceeds T/10 = {}",
                self.base_step,
                total_time / 10.0
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::StepControl("sample_stride must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::StepControl(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Number of steps covering `[0, total_time]`.
    pub fn steps_for(&self, total_time: f64) -> usize {
        ((total_time / self.base_step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}

/// Sampled solution of one propagation run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub schedule: Schedule,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// Largest `| ||psi|| - 1 |` seen at any step.
    pub norm_drift: f64,
    pub step_count: usize,
    pub step: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn initial_state(&self) -> &State {
        &self.states[0]
    }

    pub fn is_valid(&self) -> bool {
        self.norm_drift <= EVOLVED_NORMALIZATION_TOL
    }
}

/// Integrates the schedule from `initial` with the exponential-midpoint rule.
pub fn propagate(sch: &Schedule, initial: &State, ctl: &StepControl) -> Result<Trajectory> {
    ctl.validate(sch.total_time)?;
    if initial.dim() != sch.dim() {
        return Err(Error::DimensionMismatch {
            left: sch.dim(),
            right: initial.dim(),
        });
    }
    if !initial.is_normalized(NORMALIZATION_TOL) {
        return Err(Error::NotNormalized {
            norm: initial.norm(),
        });
    }

    let total = sch.total_time;
    let n = ctl.steps_for(total);
    let dt = total / n as f64;

    // (1 - s) H_I shares eigenvectors with H_I, so one decomposition serves
    // every reference step.
    let fixed = match sch.variant {
        Variant::Reference => Some(eigh(&sch.initial.matrix)?),
        Variant::Full => None,
    };

    let mut psi = initial.clone();
    let mut times = vec![0.0];
    let mut states = vec![psi.clone()];
    let mut drift = (initial.norm() - 1.0).abs();
    for k in 0..n {
        let s_mid = (k as f64 + 0.5) / n as f64;
        psi = match &fixed {
            Some(dec) => dec.apply_exp((1.0 - s_mid) * dt, &psi),
            None => eigh(&sch.at_fraction(s_mid))?.apply_exp(dt, &psi),
        };
        drift = drift.max((psi.norm() - 1.0).abs());
        if (k + 1) % ctl.sample_stride == 0 || k + 1 == n {
            times.push(if k + 1 == n { total } else { (k + 1) as f64 * dt });
            states.push(psi.clone());
        }
    }

    Ok(Trajectory {
        schedule: sch.clone(),
        times,
        states,
        norm_drift: drift,
        step_count: n,
        step: dt,
    })
}

/// Predicted `arg <g_I|g_0(t)>` for the reference evolution:
/// `-lambda (t - t^2 / (2T))`, the integral of `-(1 - t/T) lambda`.
pub fn reference_phase(ground_energy: f64, t: f64, total_time: f64) -> f64 {
    -ground_energy * (t - t * t / (2.0 * total_time))
}

/// Unwrapped `arg <reference|psi(t)>` along a trajectory.
pub fn accumulated_phases(traj: &Trajectory, reference: &State) -> Result<Vec<f64>> {
    use std::f64::consts::{PI, TAU};
    let mut out: Vec<f64> = Vec::with_capacity(traj.states.len());
    for s in &traj.states {
        let raw = inner(reference, s)?.arg();
        let phase = match out.last() {
            None => raw,
            Some(&prev) => prev + ((raw - prev + PI).rem_euclid(TAU) - PI),
        };
        out.push(phase);
    }
    Ok(out)
}

/// Propagates `g_0(t)` under `(1 - t/T) H_I` from the ground state of `H_I`
/// and checks at every sample that it is `g_I` up to the predicted phase.
pub fn propagate_reference(sch: &Schedule, ctl: &StepControl) -> Result<Trajectory> {
    if sch.variant != Variant::Reference {
        return Err(Error::VariantMismatch {
            expected: "reference",
        });
    }
    let g_i = &sch.initial.ground_state;
    let traj = propagate(sch, g_i, ctl)?;
    let lambda = sch.initial.ground_energy;
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        let aligned = distance(&phase_align(s, g_i)?, g_i)?;
        let limit = 10.0 * ctl.tolerance;
        if aligned > limit {
            return Err(Error::ReferenceDrift {
                t,
                what: "aligned distance",
                value: aligned,
                limit,
            });
        }
        let ov = inner(g_i, s)?;
        let measured = ov / ov.norm();
        let expected = Complex64::from_polar(1.0, reference_phase(lambda, t, sch.total_time));
        let err = (measured - expected).norm();
        if err > ctl.tolerance {
            return Err(Error::ReferenceDrift {
                t,
                what: "phase error",
                value: err,
                limit: ctl.tolerance,
            });
        }
    }
    Ok(traj)
}

/// Product of exact step exponentials `exp(-i H(t_k + dt/2) dt)` applied to
/// `initial`, each evaluated by a Taylor series on the vector. Meant as a test
/// oracle for small dimensions; it shares no code with the eigensolver path.
pub fn brute_force_propagator(sch: &Schedule, initial: &State, dt: f64) -> Result<State> {
    if !(dt > 0.0) || dt > sch.total_time / 100.0 * (1.0 + 1e-12) {
        return Err(Error::StepControl(format!(
            "oracle step {dt} must be in (0, T/100]"
        )));
    }
    if initial.dim() != sch.dim() {
        return Err(Error::DimensionMismatch {
            left: sch.dim(),
            right: initial.dim(),
        });
    }
    let n = ((sch.total_time / dt) * (1.0 - 1e-12)).ceil() as usize;
    let h = sch.total_time / n as f64;
    let mut psi = initial.clone();
    for k in 0..n {
        let op = sch.at_fraction((k as f64 + 0.5) / n as f64);
        psi = taylor_exp_apply(&op, h, &psi)?;
    }
    Ok(psi)
}

/// `exp(-i H tau) psi` by Taylor series, splitting `tau` so each piece has
/// `||H|| tau <= 0.5`.
fn taylor_exp_apply(op: &Operator, tau: f64, psi: &State) -> Result<State> {
    let bound = op.norm_bound();
    let pieces = ((bound * tau / 0.5).ceil() as usize).max(1);
    let h = tau / pieces as f64;
    let minus_i_h = Complex64::new(0.0, -h);
    let mut out = psi.clone();
    for _ in 0..pieces {
        let mut term = out.clone();
        let mut sum = out.clone();
        for k in 1..60 {
            term = op.apply(&term)?.scale(minus_i_h / k as f64);
            sum = &sum + &term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        out = sum;
    }
    Ok(out)
}
