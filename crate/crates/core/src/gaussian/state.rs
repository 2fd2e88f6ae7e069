use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{quadrature_row, symplectic_form};
use crate::error::{invalid, Error, Result};

/// Tolerance on symplectic eigenvalues below 1 for well-conditioned states.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Round-off in the entries of `cov` moves its symplectic eigenvalues by
/// about `ε·‖cov‖²`, so strongly squeezed states get a looser floor.
pub fn physicality_tolerance(cov: &DMatrix<f64>) -> f64 {
    PHYSICALITY_TOL.max(1e-13 * cov.amax().powi(2))
}

const SYMMETRY_TOL: f64 = 1e-12;

/// First and second moments of the quadratures of labelled modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    labels: Vec<String>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(labels: Vec<String>, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(invalid("n_modes", "need at least one mode"));
        }
        if mean.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: mean.len(),
            });
        }
        if cov.nrows() != 2 * n || cov.ncols() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: cov.nrows().max(cov.ncols()),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidModes(format!("duplicate label `{l}`")));
            }
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > SYMMETRY_TOL * scale {
            return Err(invalid("cov", "covariance matrix is not symmetric"));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { labels, mean, cov })
    }

    /// Vacuum on modes labelled `m0, m1, …`.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        let labels = (0..n_modes).map(|k| format!("m{k}")).collect();
        Self::vacuum_labeled(labels)
    }

    pub fn vacuum_labeled(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, DVector::zeros(2 * n), DMatrix::identity(2 * n, 2 * n))
    }

    /// Single-mode thermal state with mean occupation `nbar`, labelled `m0`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(invalid("nbar", format!("must be >= 0, got {nbar}")));
        }
        Self::new(
            vec!["m0".into()],
            DVector::zeros(2),
            DMatrix::identity(2, 2) * (2.0 * nbar + 1.0),
        )
    }

    pub fn relabel<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                got: labels.len(),
            });
        }
        self.labels = labels;
        Self::new(self.labels, self.mean, self.cov)
    }

    /// Product state `self ⊗ other`.
    pub fn tensor(&self, other: &GaussianState) -> Result<Self> {
        let (n, m) = (self.mean.len(), other.mean.len());
        let mut cov = DMatrix::zeros(n + m, n + m);
        cov.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        cov.view_mut((n, n), (m, m)).copy_from(&other.cov);
        let mean = DVector::from_iterator(n + m, self.mean.iter().chain(other.mean.iter()).copied());
        let labels = self.labels.iter().chain(&other.labels).cloned().collect();
        Self::new(labels, mean, cov)
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    fn indices(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l)).collect()
    }

    /// Marginal on the given modes, in the given order.
    pub fn reduce(&self, labels: &[&str]) -> Result<Self> {
        let idx = self.indices(labels)?;
        let q: Vec<usize> = idx.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let mean = DVector::from_iterator(q.len(), q.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(q.len(), q.len(), |i, j| self.cov[(q[i], q[j])]);
        Self::new(labels.iter().map(|s| s.to_string()).collect(), mean, cov)
    }

    /// `mean ↦ S·mean`, `cov ↦ S·cov·Sᵀ + noise`.
    pub fn transform(&self, s: &DMatrix<f64>, noise: Option<&DMatrix<f64>>) -> Result<Self> {
        let n = self.mean.len();
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: s.nrows(),
            });
        }
        let mut cov = s * &self.cov * s.transpose();
        if let Some(d) = noise {
            if d.nrows() != n || d.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: d.nrows(),
                });
            }
            cov += d;
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self {
            labels: self.labels.clone(),
            mean: s * &self.mean,
            cov,
        })
    }

    /// Symplectic eigenvalues in ascending order.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cov)
    }

    pub fn is_physical(&self) -> bool {
        self.symplectic_eigenvalues()
            .map(|nu| nu[0] >= 1.0 - physicality_tolerance(&self.cov))
            .unwrap_or(false)
    }

    /// `⟨a†a⟩` of one mode.
    pub fn mean_photons(&self, label: &str) -> Result<f64> {
        let k = self.index_of(label)?;
        let (x, p) = (2 * k, 2 * k + 1);
        let n = (self.cov[(x, x)] + self.cov[(p, p)] + self.mean[x].powi(2) + self.mean[p].powi(2) - 2.0) / 4.0;
        Ok(n.max(0.0))
    }

    /// Symmetrised covariance `⟨Δq_i(θ_i) Δq_j(θ_j)⟩`; equals the variance for i = j.
    pub fn quadrature_covariance(&self, mode_i: &str, theta_i: f64, mode_j: &str, theta_j: f64) -> Result<f64> {
        let n = self.n_modes();
        let vi = quadrature_row(n, self.index_of(mode_i)?, theta_i);
        let vj = quadrature_row(n, self.index_of(mode_j)?, theta_j);
        Ok(vi.dot(&(&self.cov * vj)))
    }

    /// Variance of `q_i(θ_i) − q_j(θ_j)`. Two vacua give 2.
    pub fn epr_variance(&self, mode_i: &str, mode_j: &str, theta_i: f64, theta_j: f64) -> Result<f64> {
        if mode_i == mode_j {
            return Err(Error::InvalidModes("EPR variance needs two distinct modes".into()));
        }
        let n = self.n_modes();
        let v = quadrature_row(n, self.index_of(mode_i)?, theta_i) - quadrature_row(n, self.index_of(mode_j)?, theta_j);
        Ok(v.dot(&(&self.cov * &v)).max(0.0))
    }

    /// Logarithmic negativity between two disjoint groups of modes; modes
    /// in neither group are traced out.
    pub fn log_negativity(&self, side_a: &[&str], side_b: &[&str]) -> Result<f64> {
        check_disjoint(side_a, side_b)?;
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidModes("both sides of the partition need a mode".into()));
        }
        let all: Vec<&str> = side_a.iter().chain(side_b).copied().collect();
        let reduced = self.reduce(&all)?;
        let nu = reduced.symplectic_eigenvalues()?;
        if nu[0] < 1.0 - physicality_tolerance(&reduced.cov) {
            return Err(Error::Unphysical(nu[0]));
        }
        // partial transpose on side B: P -> -P
        let mut flip = DVector::from_element(reduced.mean.len(), 1.0);
        for k in side_a.len()..all.len() {
            flip[2 * k + 1] = -1.0;
        }
        let pt = DMatrix::from_fn(flip.len(), flip.len(), |i, j| flip[i] * flip[j] * reduced.cov[(i, j)]);
        let nu_pt = symplectic_eigenvalues(&pt)?;
        Ok(nu_pt.iter().map(|&v| (-v.ln()).max(0.0)).sum())
    }

    /// Frobenius norm of the cross-covariance block between two mode groups.
    pub fn decorrelation_norm(&self, block_a: &[&str], block_b: &[&str]) -> Result<f64> {
        check_disjoint(block_a, block_b)?;
        let ia = self.indices(block_a)?;
        let ib = self.indices(block_b)?;
        let mut acc = 0.0;
        for &a in &ia {
            for &b in &ib {
                for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    acc += self.cov[(2 * a + i, 2 * b + j)].powi(2);
                }
            }
        }
        Ok(acc.sqrt())
    }
}

fn check_disjoint(a: &[&str], b: &[&str]) -> Result<()> {
    if let Some(m) = a.iter().find(|m| b.contains(m)) {
        return Err(Error::InvalidModes(format!("mode `{m}` appears on both sides")));
    }
    Ok(())
}

/// Symplectic spectrum of a positive-definite covariance matrix: the moduli
/// of the eigenvalues of `J·cov`, each reported once, ascending.
pub(crate) fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n2 = cov.nrows();
    let eig = SymmetricEigen::new(cov.clone());
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::Unphysical(min.max(0.0)));
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let k = &root * symplectic_form(n2 / 2) * &root;
    // K is antisymmetric with eigenvalues ±iν, so its singular values are
    // each ν twice. Taking them directly (not via KᵀK) keeps the small ones
    // of strongly squeezed states accurate.
    let mut sv: Vec<f64> = k.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| a.total_cmp(b));
    Ok(sv.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}
