//! Gaussian states of bosonic modes and their exact linear evolution.
//!
//! Quadratures are ordered `(X₁, P₁, X₂, P₂, …)` with `X = a + a†` and
//! `P = −i(a − a†)`, so the vacuum has `⟨X²⟩ = ⟨P²⟩ = 1` and the symplectic
//! form is `J = ⊕ [[0, 1], [−1, 0]]`. A field quadrature at local-oscillator
//! phase θ is `q(θ) = a e^{iθ} + a† e^{−iθ} = cos θ X − sin θ P`.
//!
//! Linear maps and drifts are written in terms of complex mode amplitudes
//! and converted to quadrature space with [`LinearModeMap`].

mod dynamics;
mod io;
mod state;

pub use dynamics::{
    bogoliubov_tpi, dynamics_from_couplings, evolve, propagator, tmss, DynamicsBuilder,
    LinearDynamics, SIMULTANEOUS_MODES,
};
pub use state::GaussianState;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Symplectic form for `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

/// Real quadrature-space matrix of a linear map on mode amplitudes,
/// `a_t ↦ Σ c·a_s + Σ c'·a_s†`.
///
/// Also used for drift matrices, where the map is `ȧ_t = …`.
#[derive(Debug, Clone)]
pub struct LinearModeMap {
    m: DMatrix<f64>,
}

impl LinearModeMap {
    pub fn zeros(n_modes: usize) -> Self {
        Self {
            m: DMatrix::zeros(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            m: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Adds `c · a_source` to the image of `a_target`.
    pub fn add_annihilation(&mut self, target: usize, source: usize, c: Complex64) -> &mut Self {
        let (t, s) = (2 * target, 2 * source);
        self.m[(t, s)] += c.re;
        self.m[(t, s + 1)] -= c.im;
        self.m[(t + 1, s)] += c.im;
        self.m[(t + 1, s + 1)] += c.re;
        self
    }

    /// Adds `c · a_source†` to the image of `a_target`.
    pub fn add_creation(&mut self, target: usize, source: usize, c: Complex64) -> &mut Self {
        let (t, s) = (2 * target, 2 * source);
        self.m[(t, s)] += c.re;
        self.m[(t, s + 1)] += c.im;
        self.m[(t + 1, s)] += c.im;
        self.m[(t + 1, s + 1)] -= c.re;
        self
    }

    /// Clears the row block of `target` (for maps overwriting the identity).
    pub fn clear(&mut self, target: usize) -> &mut Self {
        self.m.row_mut(2 * target).fill(0.0);
        self.m.row_mut(2 * target + 1).fill(0.0);
        self
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }
}

/// Row vector `v` with `q(θ) = v · R` for the quadrature of `mode` at phase θ.
pub(crate) fn quadrature_row(n_modes: usize, mode: usize, theta: f64) -> nalgebra::DVector<f64> {
    let mut v = nalgebra::DVector::zeros(2 * n_modes);
    v[2 * mode] = theta.cos();
    v[2 * mode + 1] = -theta.sin();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beam_splitter_map_is_symplectic() {
        // a1 -> (a1 + i a2)/√2, a2 -> (i a1 + a2)/√2
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = LinearModeMap::zeros(2);
        m.add_annihilation(0, 0, Complex64::new(h, 0.0))
            .add_annihilation(0, 1, Complex64::new(0.0, h))
            .add_annihilation(1, 0, Complex64::new(0.0, h))
            .add_annihilation(1, 1, Complex64::new(h, 0.0));
        let s = m.into_matrix();
        let j = symplectic_form(2);
        assert!((&s * &j * s.transpose() - &j).norm() < 1e-15);
    }

    #[test]
    fn squeezer_map_is_symplectic() {
        let (c, sh) = (1.3f64.cosh(), 1.3f64.sinh());
        let ph = Complex64::from_polar(sh, 0.7);
        let mut m = LinearModeMap::zeros(2);
        m.add_annihilation(0, 0, Complex64::new(c, 0.0))
            .add_creation(0, 1, ph)
            .add_annihilation(1, 1, Complex64::new(c, 0.0))
            .add_creation(1, 0, ph);
        let s = m.into_matrix();
        let j = symplectic_form(2);
        assert!((&s * &j * s.transpose() - &j).norm() < 1e-13);
    }

    #[test]
    fn quadrature_row_matches_definition() {
        // q(π/2) = -P
        let v = quadrature_row(1, 0, std::f64::consts::FRAC_PI_2);
        assert!(v[0].abs() < 1e-16 && (v[1] + 1.0).abs() < 1e-16);
    }
}
