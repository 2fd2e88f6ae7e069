//! Side-by-side run of the Gaussian engine and the Fock-space oracle.

use std::f64::consts::FRAC_PI_2;

use crate::error::Result;
use crate::fock::{self, Dims, FockState, PropagationReport};
use crate::params::Couplings;

use super::simulate_couplings;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub observable: String,
    pub gaussian: f64,
    pub fock: f64,
}

impl OracleRow {
    pub fn diff(&self) -> f64 {
        (self.gaussian - self.fock).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub r: f64,
    pub dims: Dims,
    pub propagation: PropagationReport,
    pub rows: Vec<OracleRow>,
}

impl OracleComparison {
    pub fn max_diff(&self) -> f64 {
        self.rows.iter().map(OracleRow::diff).fold(0.0, f64::max)
    }
}

/// χ₁ = 1, χ₂ = r, vacuum start, no decay, t = T_π.
///
/// Rows are the three mean occupations, the EPR variances of
/// `X₁ − X₂` and `P₁ + P₂`, and all 21 independent covariance entries.
pub fn oracle_check(r: f64, dims: Option<Dims>, leakage_tol: f64) -> Result<OracleComparison> {
    let couplings = Couplings::unit_ratio(r)?;
    let (_, t_pi) = couplings.period()?;
    let dims = match dims {
        Some(d) => d,
        None => fock::default_dims(r, leakage_tol)?,
    };

    let gauss = simulate_couplings(&couplings, 0.0, None, None)?;
    let h = fock::hamiltonian_matrix(couplings.chi1, couplings.chi2, dims)?;
    let (psi, propagation) = fock::evolve_exact(&FockState::vacuum(dims)?, &h, t_pi, leakage_tol)?;
    let obs = fock::observables(&psi);

    let state = &gauss.state;
    let mut rows = Vec::new();
    for (k, label) in ["cav1", "cav2", "motion"].into_iter().enumerate() {
        rows.push(OracleRow {
            observable: format!("n_{label}"),
            gaussian: state.mean_photons(label)?,
            fock: obs.mean_photons[k],
        });
    }
    rows.push(OracleRow {
        observable: "epr_x".into(),
        gaussian: state.epr_variance("cav1", "cav2", 0.0, 0.0)?,
        fock: obs.epr_variance(0.0, 0.0),
    });
    rows.push(OracleRow {
        observable: "epr_p".into(),
        gaussian: state.epr_variance("cav1", "cav2", FRAC_PI_2, -FRAC_PI_2)?,
        fock: obs.epr_variance(FRAC_PI_2, -FRAC_PI_2),
    });
    const NAMES: [&str; 6] = ["X1", "P1", "X2", "P2", "Xb", "Pb"];
    for i in 0..6 {
        for j in i..6 {
            rows.push(OracleRow {
                observable: format!("cov[{},{}]", NAMES[i], NAMES[j]),
                gaussian: state.cov()[(i, j)],
                fock: obs.cov[(i, j)],
            });
        }
    }
    Ok(OracleComparison {
        r,
        dims,
        propagation,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instance_agrees() {
        let cmp = oracle_check(3.0, None, 1e-10).unwrap();
        assert_eq!(cmp.rows.len(), 26);
        assert!(cmp.max_diff() < 1e-6, "{}", cmp.max_diff());
        assert!(cmp.propagation.max_leakage < 1e-10);
        assert!((cmp.rows[0].fock - 0.5625).abs() < 1e-6);
    }

    #[test]
    fn tight_truncation_is_reported() {
        assert!(matches!(
            oracle_check(3.0, Some([6, 6, 6]), 1e-10),
            Err(crate::Error::Truncation { .. })
        ));
    }
}
