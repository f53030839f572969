//! Hermitian eigensolver.
//!
//! Real symmetric tridiagonal operators go through LAPACK `dstevr` and dense
//! complex Hermitian ones through `zheevr`. Both use the MRRR algorithm, which
//! keeps small eigenvector components accurate relative to their size; the
//! factorial tails of coherent-like ground states depend on that.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::Operator;
use crate::hilbert::State;

/// Gaps below this are reported as exact degeneracies.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Largest tolerated `|H_ij - conj(H_ji)|` for dense input.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigenvalues (ascending) with their orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    vectors: Eigenvectors,
}

#[derive(Clone, Debug)]
enum Eigenvectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

#[derive(Clone, Copy)]
enum Which {
    All,
    Lowest(usize),
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        match &self.vectors {
            Eigenvectors::Real(v) => v.nrows(),
            Eigenvectors::Complex(v) => v.nrows(),
        }
    }

    /// Number of computed eigenpairs.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `k`-th eigenvector as a state (no phase convention applied).
    pub fn vector(&self, k: usize) -> State {
        let amps = match &self.vectors {
            Eigenvectors::Real(v) => v.column(k).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Eigenvectors::Complex(v) => v.column(k).iter().copied().collect(),
        };
        State::new(amps).expect("eigenvector dimension >= 2")
    }

    /// Applies `V diag(exp(-i * scale * lambda_k)) V^dagger` to `psi`.
    ///
    /// With `scale = dt` this is the exact propagator `exp(-i H dt)` of the
    /// decomposed operator; other scales give the propagator of a multiple of
    /// it. Requires a full decomposition.
    pub fn apply_exp(&self, scale: f64, psi: &State) -> State {
        assert_eq!(self.len(), self.dim(), "apply_exp needs every eigenpair");
        let n = self.dim();
        let phases: Vec<Complex64> = self
            .values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -scale * l))
            .collect();
        let amps = psi.amplitudes();
        let out = match &self.vectors {
            Eigenvectors::Real(v) => {
                // V is real, so the real and imaginary parts transform separately.
                let re: Vec<f64> = amps.iter().map(|a| a.re).collect();
                let im: Vec<f64> = amps.iter().map(|a| a.im).collect();
                let mut coeff = vec![Complex64::new(0.0, 0.0); n];
                for (k, c) in coeff.iter_mut().enumerate() {
                    let col = v.column(k);
                    let col = col.as_slice();
                    let (mut sr, mut si) = (0.0, 0.0);
                    for x in 0..n {
                        sr += col[x] * re[x];
                        si += col[x] * im[x];
                    }
                    *c = Complex64::new(sr, si) * phases[k];
                }
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (k, c) in coeff.iter().enumerate() {
                    let col = v.column(k);
                    for (o, &vx) in out.iter_mut().zip(col.as_slice()) {
                        o.re += vx * c.re;
                        o.im += vx * c.im;
                    }
                }
                out
            }
            Eigenvectors::Complex(v) => {
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for k in 0..n {
                    let col = v.column(k);
                    let col = col.as_slice();
                    let mut c = Complex64::new(0.0, 0.0);
                    for x in 0..n {
                        c += col[x].conj() * amps[x];
                    }
                    c *= phases[k];
                    for (o, &vx) in out.iter_mut().zip(col) {
                        *o += vx * c;
                    }
                }
                out
            }
        };
        State::new(out).expect("dimension preserved")
    }
}

/// Full eigendecomposition of a Hermitian operator.
pub fn eigh(op: &Operator) -> Result<EigenDecomposition> {
    decompose(op, Which::All)
}

/// The `count` lowest eigenpairs.
pub fn eigh_lowest(op: &Operator, count: usize) -> Result<EigenDecomposition> {
    decompose(op, Which::Lowest(count.clamp(1, op.dim())))
}

fn decompose(op: &Operator, which: Which) -> Result<EigenDecomposition> {
    match op {
        Operator::Tridiagonal { diag, off } => tridiagonal(diag, off, which),
        Operator::Dense(m) => {
            let dev = hermiticity_error(m);
            if dev > HERMITICITY_TOL {
                return Err(Error::NotHermitian { deviation: dev });
            }
            dense(m, which)
        }
    }
}

pub fn hermiticity_error(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn range_args(which: Which, n: usize) -> (u8, i32, i32, usize) {
    match which {
        Which::All => (b'A', 0, 0, n),
        Which::Lowest(k) => (b'I', 1, k as i32, k),
    }
}

fn tridiagonal(diag: &[f64], off: &[f64], which: Which) -> Result<EigenDecomposition> {
    let n = diag.len();
    let (range, il, iu, cols) = range_args(which, n);
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.resize(n, 0.0);
    let mut m = 0i32;
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n * cols];
    let mut isuppz = vec![0i32; 2 * n];
    let mut info = 0i32;

    let mut work_q = [0.0f64];
    let mut iwork_q = [0i32];
    // SAFETY: all slices are sized per the LAPACK dstevr contract.
    unsafe {
        lapack::dstevr(
            b'V', range, n as i32, &mut d, &mut e, 0.0, 0.0, il, iu, 0.0, &mut m, &mut w, &mut z,
            n as i32, &mut isuppz, &mut work_q, -1, &mut iwork_q, -1, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dstevr", info });
    }
    let lwork = work_q[0] as usize;
    let liwork = iwork_q[0] as usize;
    let mut work = vec![0.0; lwork];
    let mut iwork = vec![0i32; liwork];
    // SAFETY: workspace sizes come from the query above.
    unsafe {
        lapack::dstevr(
            b'V', range, n as i32, &mut d, &mut e, 0.0, 0.0, il, iu, 0.0, &mut m, &mut w, &mut z,
            n as i32, &mut isuppz, &mut work, lwork as i32, &mut iwork, liwork as i32, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dstevr", info });
    }
    let m = m as usize;
    w.truncate(m);
    z.truncate(n * m);
    Ok(EigenDecomposition {
        values: w,
        vectors: Eigenvectors::Real(DMatrix::from_vec(n, m, z)),
    })
}

fn dense(mat: &DMatrix<Complex64>, which: Which) -> Result<EigenDecomposition> {
    let n = mat.nrows();
    let (range, il, iu, cols) = range_args(which, n);
    let mut a: Vec<Complex64> = mat.as_slice().to_vec();
    let mut m = 0i32;
    let mut w = vec![0.0; n];
    let mut z = vec![Complex64::new(0.0, 0.0); n * cols];
    let mut isuppz = vec![0i32; 2 * n];
    let mut info = 0i32;

    let mut work_q = [Complex64::new(0.0, 0.0)];
    let mut rwork_q = [0.0f64];
    let mut iwork_q = [0i32];
    // SAFETY: all slices are sized per the LAPACK zheevr contract.
    unsafe {
        lapack::zheevr(
            b'V', range, b'U', n as i32, &mut a, n as i32, 0.0, 0.0, il, iu, 0.0, &mut m, &mut w,
            &mut z, n as i32, &mut isuppz, &mut work_q, -1, &mut rwork_q, -1, &mut iwork_q, -1,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zheevr", info });
    }
    let lwork = work_q[0].re as usize;
    let lrwork = rwork_q[0] as usize;
    let liwork = iwork_q[0] as usize;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork];
    let mut rwork = vec![0.0; lrwork];
    let mut iwork = vec![0i32; liwork];
    // SAFETY: workspace sizes come from the query above.
    unsafe {
        lapack::zheevr(
            b'V', range, b'U', n as i32, &mut a, n as i32, 0.0, 0.0, il, iu, 0.0, &mut m, &mut w,
            &mut z, n as i32, &mut isuppz, &mut work, lwork as i32, &mut rwork, lrwork as i32,
            &mut iwork, liwork as i32, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zheevr", info });
    }
    let m = m as usize;
    w.truncate(m);
    z.truncate(n * m);
    Ok(EigenDecomposition {
        values: w,
        vectors: Eigenvectors::Complex(DMatrix::from_vec(n, m, z)),
    })
}

/// Lowest eigenpair of a Hermitian operator together with the spectral gap.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub state: State,
    /// `lambda_1 - lambda_0`, clamped to 0 below [`DEGENERACY_TOL`].
    pub gap: f64,
    pub degenerate: bool,
}

/// Lowest eigenpair and gap. The vector is normalized, with its
/// largest-magnitude component (lowest index on ties) made real positive.
pub fn ground_state_of(op: &Operator) -> Result<GroundState> {
    let dec = eigh_lowest(op, 2)?;
    let energy = dec.values[0];
    let raw_gap = dec.values[1] - dec.values[0];
    let degenerate = raw_gap < DEGENERACY_TOL;
    let state = fix_phase(&dec.vector(0).normalized()?);
    Ok(GroundState {
        energy,
        state,
        gap: if degenerate { 0.0 } else { raw_gap },
        degenerate,
    })
}

/// Rotates `v` so that its largest-magnitude component is real positive.
/// Components within a relative 1e-10 of the maximum count as ties and the
/// lowest index wins.
pub fn fix_phase(v: &State) -> State {
    let amps = v.amplitudes();
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v.clone();
    }
    let pivot = amps
        .iter()
        .position(|a| a.norm() >= max * (1.0 - 1e-10))
        .expect("maximum exists");
    let a = amps[pivot];
    v.scale(a.conj() / a.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{delta_potential, Operator};
    use crate::hilbert::{distance, make_basis_state};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delta_diagonal_ground_state() {
        let p = delta_potential(5, 8).unwrap();
        let g = ground_state_of(&Operator::diagonal(p.values())).unwrap();
        assert_eq!(g.energy, -1.0);
        assert_eq!(g.gap, 1.0);
        assert!(!g.degenerate);
        assert!(distance(&g.state, &make_basis_state(5, 8).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn identity_is_degenerate() {
        let g = ground_state_of(&Operator::diagonal(&[1.0; 3])).unwrap();
        assert_abs_diff_eq!(g.energy, 1.0, epsilon = 1e-15);
        assert_eq!(g.gap, 0.0);
        assert!(g.degenerate);
        assert!((g.state.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_hopping() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(-1., 0.), c(-1., 0.), c(0., 0.)]);
        let g = ground_state_of(&Operator::Dense(m)).unwrap();
        assert_abs_diff_eq!(g.energy, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.gap, 2.0, epsilon = 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = State::from_real(&[h, h]).unwrap();
        assert!(distance(&g.state, &expected).unwrap() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(2., 0.), c(0., 0.)]);
        assert!(matches!(
            ground_state_of(&Operator::Dense(m)),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn phase_convention_picks_lowest_index_on_ties() {
        let v = State::new(vec![c(0., -0.5), c(0.5, 0.), c(0.0, 0.5), c(0.5, 0.)]).unwrap();
        let f = fix_phase(&v);
        assert_abs_diff_eq!(f[0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f[0].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn full_decomposition_is_sorted_and_orthonormal() {
        let op = Operator::Tridiagonal {
            diag: vec![0.3, -1.0, 2.0, 0.5, 0.0],
            off: vec![1.0, -0.7, 0.2, 1.5],
        };
        let dec = eigh(&op).unwrap();
        assert!(dec.values.windows(2).all(|w| w[0] <= w[1]));
        for i in 0..5 {
            for j in 0..5 {
                let ip = crate::hilbert::inner(&dec.vector(i), &dec.vector(j)).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(want, 0.0)).norm() < 1e-13);
            }
        }
    }
}
