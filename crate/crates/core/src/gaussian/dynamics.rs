use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{GaussianState, LinearModeMap};
use crate::error::{invalid, Error, Result};
use crate::params::Couplings;

/// Mode order of the simultaneous-pulse system.
pub const SIMULTANEOUS_MODES: [&str; 3] = ["cav1", "cav2", "motion"];

/// `d⟨R⟩/dt = A⟨R⟩`, `d cov/dt = A·cov + cov·Aᵀ + D`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDynamics {
    pub labels: Vec<String>,
    pub drift: DMatrix<f64>,
    pub diffusion: DMatrix<f64>,
}

/// Assembles Heisenberg–Langevin equations mode by mode.
#[derive(Debug, Clone)]
pub struct DynamicsBuilder {
    labels: Vec<String>,
    drift: LinearModeMap,
    diffusion: DMatrix<f64>,
}

impl DynamicsBuilder {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        Self {
            labels,
            drift: LinearModeMap::zeros(n),
            diffusion: DMatrix::zeros(2 * n, 2 * n),
        }
    }

    /// `ȧ_target += c · a_source`
    pub fn annihilation(mut self, target: usize, source: usize, c: Complex64) -> Self {
        self.drift.add_annihilation(target, source, c);
        self
    }

    /// `ȧ_target += c · a_source†`
    pub fn creation(mut self, target: usize, source: usize, c: Complex64) -> Self {
        self.drift.add_creation(target, source, c);
        self
    }

    /// Amplitude damping at rate `kappa` into a vacuum bath.
    pub fn decay(mut self, mode: usize, kappa: f64) -> Self {
        if kappa != 0.0 {
            self.drift.add_annihilation(mode, mode, Complex64::new(-kappa, 0.0));
            self.diffusion[(2 * mode, 2 * mode)] += 2.0 * kappa;
            self.diffusion[(2 * mode + 1, 2 * mode + 1)] += 2.0 * kappa;
        }
        self
    }

    pub fn build(self) -> LinearDynamics {
        LinearDynamics {
            labels: self.labels,
            drift: self.drift.into_matrix(),
            diffusion: self.diffusion,
        }
    }
}

/// Equations of motion of `H = iχ₁a₁†b† + iχ₂a₂†b + H.c.` on
/// `(cav1, cav2, motion)`:
///
/// ```text
/// ȧ₁ = χ₁ b† − κ a₁
/// ȧ₂ = χ₂ b  − κ a₂
/// ḃ  = χ₁ a₁† − χ₂* a₂
/// ```
///
/// `κ` is applied to both cavity modes only when `include_decay` is set.
pub fn dynamics_from_couplings(chi1: Complex64, chi2: Complex64, kappa: f64, include_decay: bool) -> LinearDynamics {
    let k = if include_decay { kappa } else { 0.0 };
    DynamicsBuilder::new(SIMULTANEOUS_MODES)
        .creation(0, 2, chi1)
        .annihilation(1, 2, chi2)
        .creation(2, 0, chi1)
        .annihilation(2, 1, -chi2.conj())
        .decay(0, k)
        .decay(1, k)
        .build()
}

/// `e^{A t}`.
pub fn propagator(dynamics: &LinearDynamics, t: f64) -> DMatrix<f64> {
    (&dynamics.drift * t).exp()
}

/// Exact solution of the linear moment equations over a time `t ≥ 0`.
///
/// The noise integral `N(h) = ∫₀ʰ e^{As} D e^{Aᵀs} ds` over a short step comes
/// from the exponential of the block matrix `[[−A, D], [0, Aᵀ]]·h` (Van
/// Loan). The step is kept at `‖A‖h ≤ 1/2`, because the `−A` block grows as
/// `e^{κh}` under damping, and is doubled up to `t` with
/// `F(2h) = F(h)²`, `N(2h) = F(h) N(h) F(h)ᵀ + N(h)`.
pub fn evolve(state: &GaussianState, dynamics: &LinearDynamics, t: f64) -> Result<GaussianState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let n = dynamics.drift.nrows();
    if state.mean().len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.mean().len(),
        });
    }
    if state.labels() != dynamics.labels.as_slice() {
        return Err(Error::InvalidModes(format!(
            "state modes {:?} do not match dynamics modes {:?}",
            state.labels(),
            dynamics.labels
        )));
    }
    if dynamics.diffusion.iter().all(|&d| d == 0.0) {
        return state.transform(&propagator(dynamics, t), None);
    }
    let a = &dynamics.drift;
    let norm = a.abs().row_sum().max() * t;
    let doublings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let h = t / 2f64.powi(doublings);

    let mut block = DMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-a * h));
    block.view_mut((0, n), (n, n)).copy_from(&(&dynamics.diffusion * h));
    block.view_mut((n, n), (n, n)).copy_from(&(a.transpose() * h));
    let e = block.exp();
    let mut f: DMatrix<f64> = e.view((n, n), (n, n)).transpose();
    let mut noise = &f * e.view((0, n), (n, n));
    for _ in 0..doublings {
        noise = &f * &noise * f.transpose() + &noise;
        noise = (&noise + noise.transpose()) * 0.5;
        f = &f * &f;
    }
    let noise = (&noise + noise.transpose()) * 0.5;
    state.transform(&f, Some(&noise))
}

/// Quadrature map of the closed dynamics after one period T_π = π/Θ:
///
/// ```text
/// a₁ ↦  u a₁ − v a₂†
/// a₂ ↦  v a₁† − u a₂
/// b  ↦ −b
/// ```
///
/// with `u = (|χ₁|² + |χ₂|²)/Θ²` and `v = 2χ₁χ₂/Θ²`.
pub fn bogoliubov_tpi(couplings: &Couplings) -> Result<DMatrix<f64>> {
    let (theta, _) = couplings.period()?;
    let th2 = theta * theta;
    let u = Complex64::new((couplings.chi1.norm_sqr() + couplings.chi2.norm_sqr()) / th2, 0.0);
    let v = 2.0 * couplings.chi1 * couplings.chi2 / th2;
    let mut m = LinearModeMap::zeros(3);
    m.add_annihilation(0, 0, u)
        .add_creation(0, 1, -v)
        .add_creation(1, 0, v)
        .add_annihilation(1, 1, -u)
        .add_annihilation(2, 2, Complex64::new(-1.0, 0.0));
    Ok(m.into_matrix())
}

/// Two-mode squeezed vacuum on `(cav1, cav2)` with
/// `cosh s = (1 + r²)/|1 − r²|`, `sinh s = 2r/|1 − r²|` and
/// `⟨a₁a₂⟩ = cosh s · sinh s · e^{iβ}`.
///
/// The photon-pair amplitude `2r/(1 + r²)` is invariant under `r → 1/r`,
/// so `0 < r < 1` is accepted and gives the same state as `1/r`.
pub fn tmss(r: f64, beta: f64) -> Result<GaussianState> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid("r", format!("must be finite and > 0, got {r}")));
    }
    if !beta.is_finite() {
        return Err(invalid("beta", "must be finite"));
    }
    let r = if r < 1.0 { 1.0 / r } else { r };
    if r == 1.0 {
        return Err(Error::InfiniteSqueezing);
    }
    let gap = (r - 1.0) * (r + 1.0);
    let ch = Complex64::new((1.0 + r * r) / gap, 0.0);
    let sh = Complex64::from_polar(2.0 * r / gap, beta);
    let mut m = LinearModeMap::zeros(2);
    m.add_annihilation(0, 0, ch)
        .add_creation(0, 1, sh)
        .add_annihilation(1, 1, ch)
        .add_creation(1, 0, sh);
    GaussianState::vacuum_labeled(vec!["cav1".into(), "cav2".into()])?.transform(m.matrix(), None)
}
