//! Brute-force number-basis simulation of `H = iχ₁a₁†b† + iχ₂a₂†b + H.c.`
//! on a truncated product space `(cav1, cav2, motion)`.
//!
//! This is a verification oracle for the Gaussian engine and shares no code
//! with it: quadrature moments are taken directly from the state vector.
//! It is only practical for small photon numbers (r ≳ 2); the Gaussian
//! engine is exact for this linear problem at any r.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Truncation dimension per mode, ordered `(cav1, cav2, motion)`.
pub type Dims = [usize; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    dims: Dims,
    amps: Vec<Complex64>,
}

fn check_dims(dims: Dims) -> Result<()> {
    if dims.iter().any(|&d| d < 2) {
        return Err(invalid("dims", format!("every truncation must be >= 2, got {dims:?}")));
    }
    Ok(())
}

fn occupations(dims: Dims, idx: usize) -> [usize; 3] {
    let nb = idx % dims[2];
    let rest = idx / dims[2];
    [rest / dims[1], rest % dims[1], nb]
}

fn index(dims: Dims, n: [usize; 3]) -> usize {
    (n[0] * dims[1] + n[1]) * dims[2] + n[2]
}

impl FockState {
    pub fn vacuum(dims: Dims) -> Result<Self> {
        Self::basis(dims, [0, 0, 0])
    }

    pub fn basis(dims: Dims, n: [usize; 3]) -> Result<Self> {
        check_dims(dims)?;
        if n.iter().zip(&dims).any(|(a, d)| a >= d) {
            return Err(invalid("n", format!("occupation {n:?} outside truncation {dims:?}")));
        }
        let mut amps = vec![ZERO; dims.iter().product()];
        amps[index(dims, n)] = Complex64::new(1.0, 0.0);
        Ok(Self { dims, amps })
    }

    pub fn from_amplitudes(dims: Dims, amps: Vec<Complex64>) -> Result<Self> {
        check_dims(dims)?;
        let len: usize = dims.iter().product();
        if amps.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: amps.len(),
            });
        }
        Ok(Self { dims, amps })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, n: [usize; 3]) -> Complex64 {
        self.amps[index(self.dims, n)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Population of the highest retained level of each mode.
    pub fn top_level_populations(&self) -> [f64; 3] {
        top_levels(self.dims, self.amps.iter().enumerate().map(|(i, a)| (i, a.norm_sqr())))
    }

    /// `a_mode ψ` (or `a_mode† ψ`), truncated at the top level.
    fn ladder(&self, mode: usize, raise: bool) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            let mut n = occupations(self.dims, i);
            if raise {
                if n[mode] + 1 >= self.dims[mode] {
                    continue;
                }
                n[mode] += 1;
                out[index(self.dims, n)] += a * (n[mode] as f64).sqrt();
            } else {
                if n[mode] == 0 {
                    continue;
                }
                let f = (n[mode] as f64).sqrt();
                n[mode] -= 1;
                out[index(self.dims, n)] += a * f;
            }
        }
        out
    }
}

fn top_levels(dims: Dims, pops: impl Iterator<Item = (usize, f64)>) -> [f64; 3] {
    let mut top = [0.0; 3];
    for (i, p) in pops {
        let n = occupations(dims, i);
        for k in 0..3 {
            if n[k] + 1 == dims[k] {
                top[k] += p;
            }
        }
    }
    top
}

/// Compressed-row complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.row(i).find(|&(c, _)| c == j).map(|(_, v)| v).unwrap_or(ZERO)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.n, self.n, ZERO);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `max |H_ij − conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `max |[H, N]_ij|` for an operator diagonal in the basis.
    pub fn commutator_with_diagonal(&self, diag: impl Fn(usize) -> f64) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max(((diag(j) - diag(i)) * v).norm());
            }
        }
        worst
    }

    /// Largest absolute row sum (∞-norm), an upper bound on the spectral radius.
    pub fn row_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Truncated `H/ħ` together with the basis it lives on.
#[derive(Debug, Clone, PartialEq)]
pub struct FockHamiltonian {
    pub dims: Dims,
    pub matrix: SparseMatrix,
}

impl FockHamiltonian {
    /// Photon/phonon number of `mode` on basis index `i`.
    pub fn occupation(&self, mode: usize, i: usize) -> f64 {
        occupations(self.dims, i)[mode] as f64
    }
}

/// Builds the matrix of `(H₁ + H₂)/ħ`, row by row, with
/// `H₁ = iχ₁a₁†b† − iχ₁*a₁b` and `H₂ = iχ₂a₂†b − iχ₂*a₂b†`.
pub fn hamiltonian_matrix(chi1: Complex64, chi2: Complex64, dims: Dims) -> Result<FockHamiltonian> {
    check_dims(dims)?;
    let n: usize = dims.iter().product();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(4 * n);
    let mut vals = Vec::with_capacity(4 * n);
    row_ptr.push(0);
    let sq = |a: usize, b: usize| ((a * b) as f64).sqrt();
    for row in 0..n {
        let [m1, m2, mb] = occupations(dims, row);
        // ⟨m|a₁†b†|m1-1, m2, mb-1⟩
        if m1 > 0 && mb > 0 {
            cols.push(index(dims, [m1 - 1, m2, mb - 1]));
            vals.push(I * chi1 * sq(m1, mb));
        }
        // ⟨m|a₁b|m1+1, m2, mb+1⟩
        if m1 + 1 < dims[0] && mb + 1 < dims[2] {
            cols.push(index(dims, [m1 + 1, m2, mb + 1]));
            vals.push(-I * chi1.conj() * sq(m1 + 1, mb + 1));
        }
        // ⟨m|a₂†b|m1, m2-1, mb+1⟩
        if m2 > 0 && mb + 1 < dims[2] {
            cols.push(index(dims, [m1, m2 - 1, mb + 1]));
            vals.push(I * chi2 * sq(m2, mb + 1));
        }
        // ⟨m|a₂b†|m1, m2+1, mb-1⟩
        if m2 + 1 < dims[1] && mb > 0 {
            cols.push(index(dims, [m1, m2 + 1, mb - 1]));
            vals.push(-I * chi2.conj() * sq(m2 + 1, mb));
        }
        row_ptr.push(cols.len());
    }
    Ok(FockHamiltonian {
        dims,
        matrix: SparseMatrix { n, row_ptr, cols, vals },
    })
}

/// Diagnostics of one propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationReport {
    /// Largest top-level population seen on any mode at any step.
    pub max_leakage: f64,
    /// Largest `|‖ψ‖ − 1|` after any step.
    pub max_norm_error: f64,
    pub steps: usize,
    /// Size of the invariant subspace actually propagated.
    pub active_dim: usize,
}

/// `exp(−iHt)|ψ⟩` by Taylor stepping on the subspace reachable from the
/// support of `ψ`.
///
/// Each step has `‖H‖·dt ≤ 1/2`, and the series is summed until the next
/// term is below 1e−18, so the step error sits at round-off level.
pub fn evolve_exact(state: &FockState, h: &FockHamiltonian, t: f64, leakage_tol: f64) -> Result<(FockState, PropagationReport)> {
    if state.dims != h.dims {
        return Err(Error::DimensionMismatch {
            expected: h.matrix.dim(),
            got: state.amps.len(),
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let norm0 = state.norm();
    if (norm0 - 1.0).abs() > 1e-12 {
        return Err(invalid("state", format!("norm must be 1, got {norm0}")));
    }

    // connected component of the support
    let n = h.matrix.dim();
    let mut local = vec![usize::MAX; n];
    let mut active = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, a) in state.amps.iter().enumerate() {
        if *a != ZERO {
            local[i] = active.len();
            active.push(i);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for (j, _) in h.matrix.row(i) {
            if local[j] == usize::MAX {
                local[j] = active.len();
                active.push(j);
                queue.push_back(j);
            }
        }
    }
    let m = active.len();
    let mut sub_ptr = vec![0];
    let mut sub_cols = Vec::new();
    let mut sub_vals = Vec::new();
    for &g in &active {
        for (j, v) in h.matrix.row(g) {
            sub_cols.push(local[j]);
            sub_vals.push(v);
        }
        sub_ptr.push(sub_cols.len());
    }
    let sub = SparseMatrix {
        n: m,
        row_ptr: sub_ptr,
        cols: sub_cols,
        vals: sub_vals,
    };

    let mut psi: Vec<Complex64> = active.iter().map(|&g| state.amps[g]).collect();
    let leak = |psi: &[Complex64]| {
        let top = top_levels(h.dims, active.iter().zip(psi).map(|(&g, a)| (g, a.norm_sqr())));
        top.into_iter().fold(0.0, f64::max)
    };
    let mut report = PropagationReport {
        max_leakage: leak(&psi),
        max_norm_error: 0.0,
        steps: 0,
        active_dim: m,
    };

    let steps = ((sub.row_norm() * t) / 0.5).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut term = vec![ZERO; m];
    let mut next = vec![ZERO; m];
    if t > 0.0 {
        for _ in 0..steps {
            term.copy_from_slice(&psi);
            for k in 1..=200 {
                sub.mul_vec(&term, &mut next);
                let f = -I * (dt / k as f64);
                let mut size = 0.0;
                for (tn, nx) in term.iter_mut().zip(&next) {
                    *tn = nx * f;
                    size += tn.norm_sqr();
                }
                for (p, tn) in psi.iter_mut().zip(&term) {
                    *p += tn;
                }
                if size.sqrt() < 1e-18 {
                    break;
                }
            }
            report.steps += 1;
            let nrm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            report.max_norm_error = report.max_norm_error.max((nrm - 1.0).abs());
            report.max_leakage = report.max_leakage.max(leak(&psi));
        }
    }

    let top = {
        let mut amps = vec![ZERO; n];
        for (&g, a) in active.iter().zip(&psi) {
            amps[g] = *a;
        }
        FockState { dims: h.dims, amps }
    };
    if report.max_leakage > leakage_tol {
        let pops = top.top_level_populations();
        let mode = (0..3).max_by(|&a, &b| pops[a].total_cmp(&pops[b])).unwrap_or(0);
        return Err(Error::Truncation {
            leakage: report.max_leakage,
            tolerance: leakage_tol,
            mode,
            dim: h.dims[mode],
        });
    }
    Ok((top, report))
}

/// Moments of a Fock state, in the same quadrature convention as the
/// Gaussian module (`X = a + a†`, `P = −i(a − a†)`, vacuum variance 1).
#[derive(Debug, Clone, PartialEq)]
pub struct FockObservables {
    /// `⟨a†a⟩` for cav1, cav2, motion.
    pub mean_photons: [f64; 3],
    /// `⟨R⟩` in the order `(X₁, P₁, X₂, P₂, X_b, P_b)`.
    pub mean: DVector<f64>,
    /// Symmetrised covariance of the same quadratures.
    pub cov: DMatrix<f64>,
    /// `P(n₁, n₂)` with the motion traced out.
    pub joint_cavity: DMatrix<f64>,
    /// Phonon-number distribution.
    pub motion_populations: Vec<f64>,
}

impl FockObservables {
    /// Probability mass off the photon-pair diagonal `n₁ = n₂`.
    pub fn off_diagonal_weight(&self) -> f64 {
        let total: f64 = self.joint_cavity.iter().sum();
        let k = self.joint_cavity.nrows().min(self.joint_cavity.ncols());
        total - (0..k).map(|n| self.joint_cavity[(n, n)]).sum::<f64>()
    }

    /// Variance of `q₁(θ₁) − q₂(θ₂)` with `q(θ) = cos θ X − sin θ P`.
    pub fn epr_variance(&self, theta1: f64, theta2: f64) -> f64 {
        let mut v = DVector::zeros(6);
        v[0] = theta1.cos();
        v[1] = -theta1.sin();
        v[2] = -theta2.cos();
        v[3] = theta2.sin();
        v.dot(&(&self.cov * &v))
    }

    /// `2 ln Σₙ √P(n, n)`: the log-negativity of a pure photon-paired
    /// two-mode state written in its Schmidt basis. Meaningful only when the
    /// cavity pair is pure (motion decoupled) and the off-diagonal weight
    /// is negligible.
    pub fn paired_log_negativity(&self) -> f64 {
        let k = self.joint_cavity.nrows().min(self.joint_cavity.ncols());
        2.0 * (0..k).map(|n| self.joint_cavity[(n, n)].max(0.0).sqrt()).sum::<f64>().ln()
    }
}

pub fn observables(state: &FockState) -> FockObservables {
    let dims = state.dims;
    let psi = &state.amps;
    let inner = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();

    let mut quads: Vec<Vec<Complex64>> = Vec::with_capacity(6);
    let mut mean_photons = [0.0; 3];
    for mode in 0..3 {
        let lo = state.ladder(mode, false);
        let hi = state.ladder(mode, true);
        mean_photons[mode] = inner(&lo, &lo).re;
        quads.push(lo.iter().zip(&hi).map(|(l, h)| l + h).collect());
        quads.push(lo.iter().zip(&hi).map(|(l, h)| -I * (l - h)).collect());
    }
    let mean = DVector::from_iterator(6, quads.iter().map(|q| inner(psi, q).re));
    let cov = DMatrix::from_fn(6, 6, |k, l| inner(&quads[k], &quads[l]).re - mean[k] * mean[l]);
    let cov = (&cov + cov.transpose()) * 0.5;

    let mut joint_cavity = DMatrix::zeros(dims[0], dims[1]);
    let mut motion_populations = vec![0.0; dims[2]];
    for (i, a) in psi.iter().enumerate() {
        let [n1, n2, nb] = occupations(dims, i);
        let p = a.norm_sqr();
        joint_cavity[(n1, n2)] += p;
        motion_populations[nb] += p;
    }
    FockObservables {
        mean_photons,
        mean,
        cov,
        joint_cavity,
        motion_populations,
    }
}

/// Truncation large enough that a thermal-like marginal with the largest
/// occupation reached during `[0, T_π]` (from vacuum) leaves less than
/// `leakage_tol / 100` in the top level.
///
/// From vacuum, `N_b ≤ 1/(r² − 1)`, `N₂ ≤ ⟨n⟩`, and `N₁ = N₂ + N_b`.
pub fn default_dims(r: f64, leakage_tol: f64) -> Result<Dims> {
    if !(r > 1.0) {
        return Err(Error::ProtocolUndefined { r });
    }
    let r2 = r * r;
    let n_mean = 4.0 * r2 / ((r2 - 1.0) * (r2 - 1.0));
    let n_b = 1.0 / (r2 - 1.0);
    let size = |nbar: f64| -> usize {
        let q = nbar / (nbar + 1.0);
        let d = ((leakage_tol / 100.0).ln() / q.ln()).ceil() as usize + 1;
        d.max(8)
    };
    Ok([size(n_mean + n_b), size(n_mean), size(n_b)])
}
