//! Entangled subsequent pulses with the motion as memory.
//!
//! Modes are `(cavity, motion, pulse1)`. Stage A runs the pair-creation
//! Hamiltonian H₁ alone, stage B hands the cavity field to the travelling
//! `pulse1` mode, stage C runs the exchange Hamiltonian H₂ alone.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::gaussian::{evolve, DynamicsBuilder, GaussianState, LinearModeMap};
use crate::params::{coupling_constants, PhysicalParams};

pub const SEQUENTIAL_MODES: [&str; 3] = ["cavity", "motion", "pulse1"];

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialResult {
    /// |χ₁|·t₁.
    pub squeeze: f64,
    /// Fraction of the cavity field carried away by pulse 1.
    pub transmittance: f64,
    /// |χ₂|·t₂.
    pub swap_area: f64,
    /// E_N(motion | cavity) at the end of stage A.
    pub stage_a_log_negativity: f64,
    /// E_N(pulse1 | cavity) at the end.
    pub final_log_negativity: f64,
    /// E_N(pulse1 | motion) at the end.
    pub pulse1_motion_log_negativity: f64,
    /// ‖cross-covariance(motion | pulse1, cavity)‖_F at the end.
    pub motion_decorrelation: f64,
    pub state: GaussianState,
}

/// Runs the three stages with the couplings and κ derived from `params`.
///
/// `delay` is T₁₂ in seconds; `f64::INFINITY` means complete extraction.
/// `swap_area` defaults to π/2.
pub fn run_sequential(params: &PhysicalParams, t1: f64, delay: f64, swap_area: Option<f64>) -> Result<SequentialResult> {
    params.validate()?;
    let c = coupling_constants(params)?;
    run_sequential_with(c.chi1, c.chi2, params.kappa, params.nbar_motion, t1, delay, swap_area)
}

/// [`run_sequential`] on bare couplings.
pub fn run_sequential_with(
    chi1: Complex64,
    chi2: Complex64,
    kappa: f64,
    nbar_motion: f64,
    t1: f64,
    delay: f64,
    swap_area: Option<f64>,
) -> Result<SequentialResult> {
    if !(t1.is_finite() && t1 >= 0.0) {
        return Err(invalid("t1", format!("must be >= 0, got {t1}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    if delay.is_nan() || delay < 0.0 {
        return Err(invalid("delay", format!("must be >= 0, got {delay}")));
    }
    if chi2.norm() == 0.0 || !chi2.norm().is_finite() {
        return Err(invalid("chi2", "exchange coupling must be nonzero"));
    }
    let swap_area = swap_area.unwrap_or(FRAC_PI_2);
    if !(swap_area.is_finite() && swap_area >= 0.0) {
        return Err(invalid("swap_area", format!("must be >= 0, got {swap_area}")));
    }
    let [cav, mot, p1] = SEQUENTIAL_MODES;

    let vac = GaussianState::vacuum_labeled(vec![cav.into()])?;
    let initial = vac
        .tensor(&GaussianState::thermal(nbar_motion)?.relabel([mot])?)?
        .tensor(&GaussianState::vacuum_labeled(vec![p1.into()])?)?;

    // stage A: ȧ = χ₁ b†, ḃ = χ₁ a†
    let h1 = DynamicsBuilder::new(SEQUENTIAL_MODES).creation(0, 1, chi1).creation(1, 0, chi1).build();
    let after_a = evolve(&initial, &h1, t1)?;
    let stage_a_log_negativity = after_a.log_negativity(&[mot], &[cav])?;

    // stage B: beam splitter between the cavity and the vacuum pulse1 mode
    let transmittance = -(-2.0 * kappa * delay).exp_m1();
    let (t, r) = (transmittance.sqrt(), (1.0 - transmittance).sqrt());
    let mut bs = LinearModeMap::identity(3);
    bs.clear(0).clear(2);
    bs.add_annihilation(2, 0, t.into()).add_annihilation(2, 2, r.into());
    bs.add_annihilation(0, 0, r.into()).add_annihilation(0, 2, (-t).into());
    let after_b = after_a.transform(bs.matrix(), None)?;

    // stage C: ȧ = χ₂ b, ḃ = −χ₂* a
    let h2 = DynamicsBuilder::new(SEQUENTIAL_MODES)
        .annihilation(0, 1, chi2)
        .annihilation(1, 0, -chi2.conj())
        .build();
    let state = evolve(&after_b, &h2, swap_area / chi2.norm())?;

    Ok(SequentialResult {
        squeeze: chi1.norm() * t1,
        transmittance,
        swap_area,
        stage_a_log_negativity,
        final_log_negativity: state.log_negativity(&[p1], &[cav])?,
        pulse1_motion_log_negativity: state.log_negativity(&[p1], &[mot])?,
        motion_decorrelation: state.decorrelation_norm(&[mot], &[p1, cav])?,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit(s: f64, delay: f64, area: Option<f64>) -> SequentialResult {
        run_sequential_with(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.6, 0.8),
            1.0,
            0.0,
            s,
            delay,
            area,
        )
        .unwrap()
    }

    #[test]
    fn ideal_swap_transfers_entanglement() {
        let res = unit(0.9, f64::INFINITY, None);
        assert_eq!(res.transmittance, 1.0);
        // E_N of a two-mode squeezed vacuum with squeezing s is 2s
        assert!((res.stage_a_log_negativity - 1.8).abs() < 1e-9);
        assert!((res.final_log_negativity - res.stage_a_log_negativity).abs() < 1e-9);
        assert!(res.motion_decorrelation < 1e-9);
    }

    #[test]
    fn no_drive_no_entanglement() {
        let res = unit(0.0, f64::INFINITY, None);
        assert_eq!(res.stage_a_log_negativity, 0.0);
        assert_eq!(res.final_log_negativity, 0.0);
        assert!(run_sequential_with(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 1.0, 0.0, -1.0, 1.0, None).is_err());
    }

    #[test]
    fn double_swap_returns_memory() {
        let res = unit(0.7, f64::INFINITY, Some(PI));
        assert!(res.final_log_negativity < 1e-9);
        assert!((res.pulse1_motion_log_negativity - res.stage_a_log_negativity).abs() < 1e-9);
    }

    #[test]
    fn longer_delay_extracts_more() {
        let en: Vec<f64> = [1.0, 3.0, 5.0, 10.0]
            .iter()
            .map(|&d| unit(0.8, d, None).final_log_negativity)
            .collect();
        assert!(en.windows(2).all(|w| w[1] >= w[0]), "{en:?}");
        assert!(en[0] < en[3]);
    }

    #[test]
    fn finite_delay_residual_matches_leakage_estimate() {
        // the cavity keeps amplitude e^{-κT12}; its leftover correlations end up on the motion
        let (s, kt): (f64, f64) = (1.0, 10.0);
        let res = unit(s, kt, None);
        let r = (-kt).exp();
        let t = (1.0 - r * r).sqrt();
        let expect = 2f64.sqrt() * r * ((t * ((2.0 * s).cosh() - 1.0)).powi(2) + (2.0 * s).sinh().powi(2)).sqrt();
        assert!((res.motion_decorrelation - expect).abs() < 1e-11, "{} vs {expect}", res.motion_decorrelation);
    }

    #[test]
    fn thermal_memory_is_physical() {
        let res = run_sequential_with(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 1.0, 2.0, 0.5, 4.0, None).unwrap();
        assert!(res.state.is_physical());
    }
}
