//! Comparison of the interpolated evolution with the reference evolution.
//!
//! With `H(t) = (1 - t/T) H_I + (t/T) H_P` and `H_0(t) = (1 - t/T) H_I`, both
//! started from the ground state `g_I` of `H_I`, the difference
//! `e(t) = g(t) - g_0(t)` obeys
//!
//! ```text
//! e'(t) = -i H(t) e(t) - i (t/T) H_P g_0(t)
//! d/dt ||e||^2 = -2 (t/T) Im <H_P g_0(t), e(t)>
//! ```
//!
//! so `d/dt ||e|| <= ||H_P g_0(t)|| = ||H_P g_I||` and `||e(T)|| <= T ||H_P g_I||`.
//! For the delta potential `||H_P g_I|| = |<x_min|g_I>|`, which tends to zero
//! for far-away minimizers: the final state then stays close to `g_I` up to
//! phase and the minimizer is not found.

use crate::error::{Error, Result};
use crate::evolve::eigen::ground_state_of;
use crate::evolve::Trajectory;
use crate::hamiltonian::{apply_hp, interpolate, InitialHamiltonian, Potential, Schedule, Variant};
use crate::hilbert::{distance, make_basis_state, inner, phase_align, State};

/// Default numerical allowance on the bound inequality.
pub const BOUND_SLACK: f64 = 1e-6;

/// Minimum number of samples for the pointwise derivative check.
pub const GRONWALL_MIN_SAMPLES: usize = 20;

/// The comparison bound `T ||H_P g_I||` and, once trajectories are supplied,
/// the measured deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub total_time: f64,
    /// `|<x_min|g_I>|`, present for unshifted delta potentials.
    pub overlap: Option<f64>,
    pub hp_gi_norm: f64,
    pub bound: f64,
    /// `||g(T) - g_0(T)||`, no phase alignment.
    pub deviation: Option<f64>,
    /// Distance after phase alignment; informational, carries no bound.
    pub aligned_deviation: Option<f64>,
    pub slack: f64,
    pub satisfied: Option<bool>,
}

impl BoundReport {
    /// Fills in the deviation fields from a full and a reference trajectory.
    pub fn evaluate(mut self, full: &Trajectory, reference: &Trajectory, slack: f64) -> Result<Self> {
        let dev = deviation(full, reference)?;
        let g = full.final_state();
        let g0 = reference.final_state();
        self.aligned_deviation = match phase_align(g, g0) {
            Ok(a) => Some(distance(&a, g0)?),
            Err(Error::UndefinedPhase) => Some(dev),
            Err(e) => return Err(e),
        };
        self.deviation = Some(dev);
        self.slack = slack;
        self.satisfied = Some(dev <= self.bound + slack);
        Ok(self)
    }
}

/// `T ||H_P g_I||` for potential `p` and initial Hamiltonian `hi`.
pub fn tsirelson_bound(p: &Potential, hi: &InitialHamiltonian, total_time: f64) -> Result<BoundReport> {
    if !(total_time > 0.0) {
        return Err(Error::InvalidParameter {
            name: "total_time".into(),
            reason: format!("must be positive, got {total_time}"),
        });
    }
    let hp_gi_norm = apply_hp(p, &hi.ground_state)?.norm();
    let overlap = match p.delta_site() {
        Some(x) => Some(inner(&make_basis_state(x, p.dim())?, &hi.ground_state)?.norm()),
        None => None,
    };
    Ok(BoundReport {
        total_time,
        overlap,
        hp_gi_norm,
        bound: total_time * hp_gi_norm,
        deviation: None,
        aligned_deviation: None,
        slack: BOUND_SLACK,
        satisfied: None,
    })
}

fn check_aligned(a: &Trajectory, b: &Trajectory) -> Result<()> {
    let (sa, sb) = (&a.schedule, &b.schedule);
    if sa.dim() != sb.dim() {
        return Err(Error::DimensionMismatch {
            left: sa.dim(),
            right: sb.dim(),
        });
    }
    if sa.total_time != sb.total_time {
        return Err(Error::Misaligned(format!(
            "total times differ: {} vs {}",
            sa.total_time, sb.total_time
        )));
    }
    if sa.initial.matrix != sb.initial.matrix {
        return Err(Error::Misaligned("initial Hamiltonians differ".into()));
    }
    if a.times.len() != b.times.len() {
        return Err(Error::Misaligned(format!(
            "sample counts differ: {} vs {}",
            a.times.len(),
            b.times.len()
        )));
    }
    let tol = 1e-12 * sa.total_time;
    if let Some((ta, tb)) = a.times.iter().zip(&b.times).find(|(x, y)| (*x - *y).abs() > tol) {
        return Err(Error::Misaligned(format!("sample times differ: {ta} vs {tb}")));
    }
    Ok(())
}

/// `||g(T) - g_0(T)||` between the final states, without phase alignment.
pub fn deviation(full: &Trajectory, reference: &Trajectory) -> Result<f64> {
    check_aligned(full, reference)?;
    distance(full.final_state(), reference.final_state())
}

/// Per-sample comparison of `d/dt ||g - g_0||` with `||H_P g_0(t)||`.
#[derive(Clone, Debug, PartialEq)]
pub struct GronwallReport {
    /// Interior sample times.
    pub times: Vec<f64>,
    /// Central-difference estimates of `d/dt ||g - g_0||`.
    pub fd_rates: Vec<f64>,
    /// `-(t/T) Im <H_P g_0, e> / ||e||` evaluated on the samples.
    pub exact_rates: Vec<f64>,
    /// `||H_P g_0(t)||`.
    pub bound_rates: Vec<f64>,
    /// `max(0, max_k fd_rate_k - bound_rate_k)`.
    pub max_violation: f64,
    /// `max_k |fd_rate_k - exact_rate_k|`, the finite-difference error scale.
    pub fd_error: f64,
    /// Spread `max - min` of `||H_P g_0(t)||` over all samples.
    pub hp_g0_spread: f64,
}

impl GronwallReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.max_violation <= tolerance
    }
}

/// Checks the differential inequality at every interior sample.
pub fn gronwall_check(full: &Trajectory, reference: &Trajectory, p: &Potential) -> Result<GronwallReport> {
    check_aligned(full, reference)?;
    let n = full.times.len();
    if n < GRONWALL_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: GRONWALL_MIN_SAMPLES,
            got: n,
        });
    }
    let total = full.schedule.total_time;
    let diffs: Vec<State> = full
        .states
        .iter()
        .zip(&reference.states)
        .map(|(g, g0)| g - g0)
        .collect();
    let dist: Vec<f64> = diffs.iter().map(State::norm).collect();
    let hp_g0: Vec<State> = reference
        .states
        .iter()
        .map(|g0| apply_hp(p, g0))
        .collect::<Result<_>>()?;
    let hp_norms: Vec<f64> = hp_g0.iter().map(State::norm).collect();

    let mut report = GronwallReport {
        times: Vec::with_capacity(n - 2),
        fd_rates: Vec::with_capacity(n - 2),
        exact_rates: Vec::with_capacity(n - 2),
        bound_rates: Vec::with_capacity(n - 2),
        max_violation: 0.0,
        fd_error: 0.0,
        hp_g0_spread: hp_norms.iter().cloned().fold(f64::MIN, f64::max)
            - hp_norms.iter().cloned().fold(f64::MAX, f64::min),
    };
    for k in 1..n - 1 {
        let t = full.times[k];
        let fd = (dist[k + 1] - dist[k - 1]) / (full.times[k + 1] - full.times[k - 1]);
        let exact = if dist[k] > 0.0 {
            -(t / total) * inner(&hp_g0[k], &diffs[k])?.im / dist[k]
        } else {
            0.0
        };
        report.max_violation = report.max_violation.max(fd - hp_norms[k]);
        report.fd_error = report.fd_error.max((fd - exact).abs());
        report.times.push(t);
        report.fd_rates.push(fd);
        report.exact_rates.push(exact);
        report.bound_rates.push(hp_norms[k]);
    }
    Ok(report)
}

/// `|<x_min|psi>|^2`.
pub fn success_probability(psi: &State, x_min: usize) -> Result<f64> {
    if x_min >= psi.dim() {
        return Err(Error::OutOfRange {
            index: x_min,
            dim: psi.dim(),
        });
    }
    Ok(psi[x_min].norm_sqr().min(1.0))
}

/// The chain `|<x|g(T)>| <= |<x|g_0(T)>| + ||g - g_0|| <= |<x|g_I>| + T ||H_P g_I||`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuccessSandwich {
    pub success_amplitude: f64,
    pub reference_amplitude: f64,
    pub initial_amplitude: f64,
    pub deviation: f64,
    pub bound: f64,
}

impl SuccessSandwich {
    pub fn holds(&self, slack: f64) -> bool {
        self.success_amplitude <= self.reference_amplitude + self.deviation + slack
            && self.reference_amplitude + self.deviation <= self.initial_amplitude + self.bound + slack
    }
}

pub fn success_sandwich(
    full: &Trajectory,
    reference: &Trajectory,
    report: &BoundReport,
    x_min: usize,
) -> Result<SuccessSandwich> {
    let dev = match report.deviation {
        Some(d) => d,
        None => deviation(full, reference)?,
    };
    let g_i = &full.schedule.initial.ground_state;
    Ok(SuccessSandwich {
        success_amplitude: success_probability(full.final_state(), x_min)?.sqrt(),
        reference_amplitude: success_probability(reference.final_state(), x_min)?.sqrt(),
        initial_amplitude: success_probability(g_i, x_min)?.sqrt(),
        deviation: dev,
        bound: report.bound,
    })
}

/// Instantaneous spectral gap along the schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct GapProfile {
    pub times: Vec<f64>,
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    pub argmin_time: f64,
}

/// Gap `lambda_1 - lambda_0` of `H(t)` at `samples` equally spaced times.
pub fn gap_profile(sch: &Schedule, samples: usize) -> Result<GapProfile> {
    if sch.variant != Variant::Full {
        return Err(Error::VariantMismatch { expected: "full" });
    }
    if samples < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples,
        });
    }
    let total = sch.total_time;
    let mut times = Vec::with_capacity(samples);
    let mut gaps = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = if k + 1 == samples {
            total
        } else {
            total * k as f64 / (samples - 1) as f64
        };
        gaps.push(ground_state_of(&interpolate(sch, t)?)?.gap);
        times.push(t);
    }
    let (imin, &min_gap) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least two samples");
    Ok(GapProfile {
        argmin_time: times[imin],
        min_gap,
        times,
        gaps,
    })
}

/// Exhaustive minimum of `P` over `0..upper_bound`; lowest index wins ties.
pub fn classical_minimize(p: &Potential, upper_bound: usize) -> Result<(usize, f64)> {
    if upper_bound == 0 {
        return Err(Error::InvalidParameter {
            name: "upper_bound".into(),
            reason: "must be at least 1".into(),
        });
    }
    if upper_bound > p.dim() {
        return Err(Error::OutOfRange {
            index: upper_bound,
            dim: p.dim(),
        });
    }
    let values = &p.values()[..upper_bound];
    let mut best = 0;
    for (x, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = x;
        }
    }
    Ok((best, values[best]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{propagate, propagate_reference, StepControl};
    use crate::hamiltonian::{build_hi, delta_potential, poly_potential, InitialKind, Params};
    use crate::hilbert::make_basis_state;

    fn uniform_hi(dim: usize) -> InitialHamiltonian {
        // N * I - J, with J the all-ones matrix: the uniform vector has energy 0
        let mut m = nalgebra::DMatrix::from_element(dim, dim, num_complex::Complex64::new(-1.0, 0.0));
        for i in 0..dim {
            m[(i, i)] = num_complex::Complex64::new(dim as f64 - 1.0, 0.0);
        }
        InitialHamiltonian::from_operator(InitialKind::Random, crate::hamiltonian::Operator::Dense(m)).unwrap()
    }

    fn runs(hi: InitialHamiltonian, p: Potential, t: f64, ctl: StepControl) -> (Trajectory, Trajectory) {
        let full = Schedule::full(hi, p, t).unwrap();
        let g_i = full.initial.ground_state.clone();
        let a = propagate(&full, &g_i, &ctl).unwrap();
        let b = propagate_reference(&full.with_variant(Variant::Reference), &ctl).unwrap();
        (a, b)
    }

    #[test]
    fn bound_for_uniform_ground_state() {
        let hi = uniform_hi(4);
        let r = tsirelson_bound(&delta_potential(2, 4).unwrap(), &hi, 10.0).unwrap();
        assert!((r.hp_gi_norm - 0.5).abs() < 1e-14);
        assert!((r.bound - 5.0).abs() < 1e-13);
        assert!((r.overlap.unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn bound_for_zero_potential_is_zero() {
        let hi = build_hi(InitialKind::Hopping, &Params::new(), 6, 0).unwrap();
        let r = tsirelson_bound(&Potential::zero(6).unwrap(), &hi, 3.0).unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.overlap, None);
    }

    #[test]
    fn bound_is_linear_in_time() {
        let hi = build_hi(InitialKind::Random, &Params::new(), 9, 4).unwrap();
        let p = delta_potential(7, 9).unwrap();
        let a = tsirelson_bound(&p, &hi, 3.0).unwrap().bound;
        let b = tsirelson_bound(&p, &hi, 6.0).unwrap().bound;
        assert_eq!(b / a, 2.0);
    }

    #[test]
    fn coherent_like_bound_is_astronomically_small() {
        let hi = build_hi(InitialKind::CoherentLike, &Params::from([("alpha".into(), 1.0)]), 256, 0).unwrap();
        let r = tsirelson_bound(&delta_potential(50, 256).unwrap(), &hi, 100.0).unwrap();
        // |<50|alpha=1>| = e^{-1/2} / sqrt(50!) = 3.4779e-33
        let mut amp = (-0.5f64).exp();
        for k in 1..=50 {
            amp /= (k as f64).sqrt();
        }
        assert!((r.overlap.unwrap() - amp).abs() / amp < 1e-6);
        assert!(r.bound < 1e-30);
    }

    #[test]
    fn deviation_examples() {
        let hi = build_hi(InitialKind::Hopping, &Params::new(), 4, 0).unwrap();
        let ctl = StepControl::new(0.01, 10);
        let (full, reference) = runs(hi.clone(), delta_potential(1, 4).unwrap(), 5.0, ctl);
        assert_eq!(deviation(&full, &full).unwrap(), 0.0);
        let d = deviation(&full, &reference).unwrap();
        let r = tsirelson_bound(&delta_potential(1, 4).unwrap(), &hi, 5.0).unwrap();
        assert!(d > 0.0 && d <= r.bound + 1e-6);

        let (zf, zr) = runs(hi, Potential::zero(4).unwrap(), 5.0, ctl);
        assert!(deviation(&zf, &zr).unwrap() <= 1e-9);
    }

    #[test]
    fn deviation_rejects_misaligned() {
        let hi = build_hi(InitialKind::Hopping, &Params::new(), 4, 0).unwrap();
        let (a, _) = runs(hi.clone(), delta_potential(1, 4).unwrap(), 5.0, StepControl::new(0.01, 10));
        let (b, _) = runs(hi.clone(), delta_potential(1, 4).unwrap(), 4.0, StepControl::new(0.01, 10));
        assert!(matches!(deviation(&a, &b), Err(Error::Misaligned(_))));
        let (c, _) = runs(hi, delta_potential(1, 4).unwrap(), 5.0, StepControl::new(0.01, 5));
        assert!(matches!(deviation(&a, &c), Err(Error::Misaligned(_))));
    }

    #[test]
    fn evaluate_fills_deviation() {
        let hi = build_hi(InitialKind::Hopping, &Params::new(), 4, 0).unwrap();
        let p = delta_potential(1, 4).unwrap();
        let (full, reference) = runs(hi.clone(), p.clone(), 5.0, StepControl::new(0.01, 10));
        let r = tsirelson_bound(&p, &hi, 5.0)
            .unwrap()
            .evaluate(&full, &reference, BOUND_SLACK)
            .unwrap();
        assert_eq!(r.satisfied, Some(true));
        assert!(r.aligned_deviation.unwrap() <= r.deviation.unwrap() + 1e-15);
        let sw = success_sandwich(&full, &reference, &r, 1).unwrap();
        assert!(sw.holds(1e-12));
    }

    #[test]
    fn gronwall_zero_potential() {
        let hi = build_hi(InitialKind::Hopping, &Params::new(), 5, 0).unwrap();
        let p = Potential::zero(5).unwrap();
        let (full, reference) = runs(hi, p.clone(), 2.0, StepControl::new(0.01, 2));
        let g = gronwall_check(&full, &reference, &p).unwrap();
        assert!(g.max_violation <= 1e-9);
        assert!(g.fd_rates.iter().all(|r| r.abs() <= 1e-8));
    }

    #[test]
    fn gronwall_needs_samples() {
        let hi = build_hi(InitialKind::Hopping, &Params::new(), 5, 0).unwrap();
        let p = delta_potential(2, 5).unwrap();
        let (full, reference) = runs(hi, p.clone(), 2.0, StepControl::new(0.01, 50));
        assert!(matches!(
            gronwall_check(&full, &reference, &p),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn gronwall_delta_rate_is_constant() {
        let hi = build_hi(InitialKind::CoherentLike, &Params::new(), 12, 0).unwrap();
        let p = delta_potential(2, 12).unwrap();
        let (full, reference) = runs(hi, p.clone(), 4.0, StepControl::new(0.01, 5));
        let g = gronwall_check(&full, &reference, &p).unwrap();
        assert!(g.hp_g0_spread <= 1e-8);
        assert!(g.fd_error < 1e-3);
    }

    #[test]
    fn success_probability_examples() {
        let e3 = make_basis_state(3, 5).unwrap();
        assert_eq!(success_probability(&e3, 3).unwrap(), 1.0);
        assert_eq!(success_probability(&e3, 1).unwrap(), 0.0);
        assert!(success_probability(&e3, 5).is_err());
    }

    #[test]
    fn gap_profile_endpoints() {
        let hi = build_hi(InitialKind::Hopping, &Params::new(), 10, 0).unwrap();
        let sch = Schedule::full(hi.clone(), delta_potential(6, 10).unwrap(), 3.0).unwrap();
        let g = gap_profile(&sch, 9).unwrap();
        assert_eq!(g.times.len(), 9);
        assert!((g.gaps[0] - hi.ground_gap).abs() <= 1e-10);
        assert!((g.gaps[8] - 1.0).abs() <= 1e-10);
        assert_eq!(g.min_gap, g.gaps.iter().cloned().fold(f64::MAX, f64::min));
        assert!(g.gaps.iter().all(|&x| x >= 0.0));
        assert!(gap_profile(&sch, 1).is_err());
        assert!(gap_profile(&sch.with_variant(Variant::Reference), 5).is_err());
    }

    #[test]
    fn classical_examples() {
        assert_eq!(
            classical_minimize(&delta_potential(7, 100).unwrap(), 100).unwrap(),
            (7, -1.0)
        );
        assert_eq!(
            classical_minimize(&poly_potential(&[9., -6., 1.], 6).unwrap(), 6).unwrap(),
            (3, 0.0)
        );
        assert_eq!(
            classical_minimize(&Potential::zero(5).unwrap(), 5).unwrap(),
            (0, 0.0)
        );
        assert!(classical_minimize(&Potential::zero(5).unwrap(), 0).is_err());
        assert!(classical_minimize(&Potential::zero(5).unwrap(), 6).is_err());
        // a bound below the minimizer misses it
        assert_eq!(
            classical_minimize(&delta_potential(7, 100).unwrap(), 5).unwrap(),
            (0, 0.0)
        );
    }
}
