//! The two pulse protocols and the homodyne read-out.
//!
//! *Simultaneous pulses*: a drive of length T_π takes
//! `vacuum ⊗ vacuum ⊗ μ` (μ any motional state) to a two-mode squeezed state
//! of the cavity modes, with the motion decoupled again.
//!
//! *Sequential pulses*: a single cavity mode is first squeezed together with
//! the motion, the field leaves the cavity, and an exchange pulse then maps
//! the motional state back onto the (new) cavity field.

mod homodyne;
mod oracle;
mod sequential;

use std::f64::consts::FRAC_PI_2;

pub use homodyne::{
    attenuate_and_mix_signal, fig3_sweep, output_signal, quadrature_moments, HomodyneSettings, SignalTrace,
    FIG3_R_VALUES,
};
pub use oracle::{oracle_check, OracleComparison, OracleRow};
pub use sequential::{run_sequential, run_sequential_with, SequentialResult, SEQUENTIAL_MODES};

use crate::error::{Error, Result};
use crate::gaussian::{dynamics_from_couplings, evolve, tmss, GaussianState, SIMULTANEOUS_MODES};
use crate::params::{coupling_constants, validate_regime, Couplings, PhysicalParams, RegimeReport};

/// How [`run_simultaneous`] gates and configures the run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousOptions {
    /// Factor used for "≫" in the regime check.
    pub ratio: f64,
    pub soft_ratio: f64,
    /// Run even if hard regime constraints fail.
    pub force: bool,
    /// Replace |χ₂| so that |χ₂/χ₁| equals this value.
    pub r_override: Option<f64>,
    /// Keep cavity decay on during the drive. Non-normative; the reference
    /// model neglects decay over T_π.
    pub decay_during_drive: bool,
}

impl Default for SimultaneousOptions {
    fn default() -> Self {
        Self {
            ratio: crate::params::DEFAULT_RATIO,
            soft_ratio: crate::params::DEFAULT_SOFT_RATIO,
            force: false,
            r_override: None,
            decay_during_drive: false,
        }
    }
}

/// Figures of merit of the state at the end of the drive.
#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousDiagnostics {
    pub mean_photons_cav1: f64,
    pub mean_photons_cav2: f64,
    pub mean_photons_motion: f64,
    /// E_N(cav1 | cav2).
    pub log_negativity: f64,
    /// Δ(X₁ − X₂)².
    pub epr_x: f64,
    /// Δ(P₁ + P₂)².
    pub epr_p: f64,
    /// Δ(q₁ − q₂)² at the phase matched to β (θ₁ = −β, θ₂ = 0).
    pub epr_matched: f64,
    /// ‖cross-covariance(motion | cav1, cav2)‖_F.
    pub motion_decorrelation: f64,
    /// max |cov − cov_tmss(r, β)| over the cavity block.
    pub tmss_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousRun {
    pub couplings: Couplings,
    pub regime: Option<RegimeReport>,
    pub duration: f64,
    pub state: GaussianState,
    pub diagnostics: SimultaneousDiagnostics,
}

/// Three-mode initial state `vacuum ⊗ vacuum ⊗ thermal(n̄)`.
pub fn initial_state(nbar_motion: f64) -> Result<GaussianState> {
    let vac = GaussianState::vacuum_labeled(vec!["cav1".into(), "cav2".into()])?;
    vac.tensor(&GaussianState::thermal(nbar_motion)?.relabel(["motion"])?)
}

/// Drives the system for T_π from `vacuum ⊗ vacuum ⊗ thermal(n̄)`.
pub fn run_simultaneous(params: &PhysicalParams, opts: &SimultaneousOptions) -> Result<SimultaneousRun> {
    params.validate()?;
    let mut couplings = coupling_constants(params)?;
    if let Some(r) = opts.r_override {
        couplings = couplings.with_ratio(r)?;
    }
    couplings.period()?;
    let regime = validate_regime(params, &couplings, opts.ratio, opts.soft_ratio);
    if !regime.pass() && !opts.force {
        return Err(Error::RegimeViolation(regime.failures().join(", ")));
    }
    let kappa = if opts.decay_during_drive { Some(params.kappa) } else { None };
    let mut run = simulate_couplings(&couplings, params.nbar_motion, kappa, params.pulse_length)?;
    run.regime = Some(regime);
    Ok(run)
}

/// Core of [`run_simultaneous`] without the parameter/regime layer.
///
/// `kappa = Some(κ)` keeps cavity decay on during the drive. `duration`
/// defaults to T_π.
pub fn simulate_couplings(
    couplings: &Couplings,
    nbar_motion: f64,
    kappa: Option<f64>,
    duration: Option<f64>,
) -> Result<SimultaneousRun> {
    let (_, t_pi) = couplings.period()?;
    let duration = duration.unwrap_or(t_pi);
    let dynamics = dynamics_from_couplings(couplings.chi1, couplings.chi2, kappa.unwrap_or(0.0), kappa.is_some());
    let state = evolve(&initial_state(nbar_motion)?, &dynamics, duration)?;

    let [c1, c2, m] = SIMULTANEOUS_MODES;
    let target = tmss(couplings.r, couplings.beta)?;
    let cav = state.reduce(&[c1, c2])?;
    let tmss_deviation = (cav.cov() - target.cov()).amax();
    let diagnostics = SimultaneousDiagnostics {
        mean_photons_cav1: state.mean_photons(c1)?,
        mean_photons_cav2: state.mean_photons(c2)?,
        mean_photons_motion: state.mean_photons(m)?,
        log_negativity: state.log_negativity(&[c1], &[c2])?,
        epr_x: state.epr_variance(c1, c2, 0.0, 0.0)?,
        epr_p: state.epr_variance(c1, c2, FRAC_PI_2, -FRAC_PI_2)?,
        epr_matched: state.epr_variance(c1, c2, -couplings.beta, 0.0)?,
        motion_decorrelation: state.decorrelation_norm(&[m], &[c1, c2])?,
        tmss_deviation,
    };
    Ok(SimultaneousRun {
        couplings: *couplings,
        regime: None,
        duration,
        state,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn r_1p1_photon_number() {
        let run = simulate_couplings(&Couplings::unit_ratio(1.1).unwrap(), 0.0, None, None).unwrap();
        assert!((run.diagnostics.mean_photons_cav1 - 109.75).abs() < 0.01);
        assert!((run.diagnostics.mean_photons_cav2 - 109.75).abs() < 0.01);
        assert!(run.diagnostics.tmss_deviation < 1e-9 * 220.0);
    }

    #[test]
    fn motion_initial_state_does_not_matter() {
        let c = Couplings::from_chi(Complex64::new(0.8, 0.1), Complex64::new(1.3, -0.7), None).unwrap();
        let a = simulate_couplings(&c, 0.0, None, None).unwrap();
        let b = simulate_couplings(&c, 5.0, None, None).unwrap();
        let ca = a.state.reduce(&["cav1", "cav2"]).unwrap();
        let cb = b.state.reduce(&["cav1", "cav2"]).unwrap();
        assert!((ca.cov() - cb.cov()).amax() < 1e-9);
        assert!(b.diagnostics.motion_decorrelation < 1e-9);
        assert!((b.diagnostics.mean_photons_motion - 5.0).abs() < 1e-9);
    }

    #[test]
    fn weak_pair_creation_leaves_cavity_empty() {
        let c = Couplings::from_chi(Complex64::new(1e-12, 0.0), Complex64::new(1.0, 0.0), None).unwrap();
        let run = simulate_couplings(&c, 0.0, None, None).unwrap();
        assert!(run.diagnostics.mean_photons_cav1 < 1e-20);
        assert!(run.diagnostics.mean_photons_cav2 < 1e-20);
        assert!(run.diagnostics.log_negativity < 1e-10);
        let s = run.state.cov();
        // b -> -b maps thermal/vacuum motion onto itself
        assert!((s[(4, 4)] - 1.0).abs() < 1e-12 && (s[(5, 5)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn below_threshold_is_undefined() {
        let c = Couplings::unit_ratio(0.9).unwrap();
        assert!(matches!(simulate_couplings(&c, 0.0, None, None), Err(Error::ProtocolUndefined { .. })));
    }

    #[test]
    fn regime_gate() {
        let p = PhysicalParams::indium();
        // η ≈ 0.104 and Θ/κ ≈ 7 fail at the default factor 10
        let err = run_simultaneous(&p, &SimultaneousOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RegimeViolation(_)));
        let opts = SimultaneousOptions {
            force: true,
            ..Default::default()
        };
        assert!(run_simultaneous(&p, &opts).is_ok());
        let opts = SimultaneousOptions {
            ratio: 5.0,
            ..Default::default()
        };
        let run = run_simultaneous(&p, &opts).unwrap();
        assert!(run.regime.unwrap().pass());
    }

    #[test]
    fn lossy_drive_degrades_entanglement() {
        let p = PhysicalParams::indium();
        let ideal = run_simultaneous(&p, &SimultaneousOptions { ratio: 5.0, ..Default::default() }).unwrap();
        let lossy = run_simultaneous(
            &p,
            &SimultaneousOptions {
                ratio: 5.0,
                decay_during_drive: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(lossy.state.is_physical());
        assert!(lossy.diagnostics.log_negativity < ideal.diagnostics.log_negativity);
        assert!(lossy.diagnostics.log_negativity > 0.0);
    }
}
