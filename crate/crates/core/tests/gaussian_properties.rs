use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use entpulse::gaussian::{
    bogoliubov_tpi, dynamics_from_couplings, evolve, propagator, symplectic_form, tmss, GaussianState,
};
use entpulse::params::Couplings;
use entpulse::protocol::{attenuate_and_mix_signal, initial_state, output_signal, quadrature_moments, simulate_couplings, HomodyneSettings};

fn couplings() -> impl Strategy<Value = Couplings> {
    (0.3f64..2.0, -PI..PI, 1.02f64..3.0, -PI..PI).prop_map(|(a1, p1, r, p2)| {
        Couplings::from_chi(Complex64::from_polar(a1, p1), Complex64::from_polar(r * a1, p2), None).unwrap()
    })
}

fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let j = symplectic_form(s.nrows() / 2);
    (s * &j * s.transpose() - j).amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_propagator_is_symplectic(c in couplings(), frac in 0.0f64..2.0) {
        let (_, t_pi) = c.period().unwrap();
        let s = propagator(&dynamics_from_couplings(c.chi1, c.chi2, 0.0, false), frac * t_pi);
        let scale = s.amax().powi(2);
        prop_assert!(symplectic_defect(&s) < 1e-11 * scale.max(1.0));
    }

    #[test]
    fn bogoliubov_map_is_symplectic(c in couplings()) {
        let s = bogoliubov_tpi(&c).unwrap();
        prop_assert!(symplectic_defect(&s) < 1e-9 * s.amax().powi(2));
    }

    #[test]
    fn two_periods_restore_the_input(c in couplings(), nbar in 0.0f64..4.0) {
        let (_, t_pi) = c.period().unwrap();
        let dynamics = dynamics_from_couplings(c.chi1, c.chi2, 0.0, false);
        let start = initial_state(nbar).unwrap();
        let back = evolve(&start, &dynamics, 2.0 * t_pi).unwrap();
        let n = c.n_mean.unwrap();
        prop_assert!((back.cov() - start.cov()).amax() < 1e-10 * (1.0 + n));
    }

    #[test]
    fn state_at_t_pi_is_tmss(c in couplings()) {
        let run = simulate_couplings(&c, 0.0, None, None).unwrap();
        let n = c.n_mean.unwrap();
        prop_assert!(run.diagnostics.tmss_deviation < 1e-11 * (1.0 + n));
        prop_assert!((run.diagnostics.mean_photons_cav1 - n).abs() < 1e-9 * (1.0 + n));
        prop_assert!(run.diagnostics.motion_decorrelation < 1e-10 * (1.0 + n));
    }

    #[test]
    fn lossy_evolution_stays_physical(c in couplings(), kappa in 0.01f64..2.0, frac in 0.1f64..3.0) {
        let (_, t_pi) = c.period().unwrap();
        let dynamics = dynamics_from_couplings(c.chi1, c.chi2, kappa, true);
        let out = evolve(&initial_state(1.0).unwrap(), &dynamics, frac * t_pi).unwrap();
        prop_assert!(out.is_physical());
    }

    #[test]
    fn tmss_is_pure_and_symmetric_in_r(r in 1.01f64..6.0, beta in -PI..PI) {
        let s = tmss(r, beta).unwrap();
        for nu in s.symplectic_eigenvalues().unwrap() {
            prop_assert!((nu - 1.0).abs() < 1e-8 * s.cov().amax());
        }
        let inv = tmss(1.0 / r, beta).unwrap();
        prop_assert!((s.cov() - inv.cov()).amax() < 1e-9 * s.cov().amax());
        let r2 = r * r;
        let n = 4.0 * r2 / ((r2 - 1.0) * (r2 - 1.0));
        prop_assert!((s.mean_photons("cav1").unwrap() - n).abs() < 1e-10 * (1.0 + n));
    }

    #[test]
    fn log_negativity_of_tmss(r in 1.05f64..6.0, beta in -PI..PI) {
        // E_N = 2s with e^s = (r + 1)/(r − 1)
        let s = tmss(r, beta).unwrap();
        let expect = 2.0 * ((r + 1.0) / (r - 1.0)).ln();
        prop_assert!((s.log_negativity(&["cav1"], &["cav2"]).unwrap() - expect).abs() < 1e-8);
    }

    #[test]
    fn moments_match_state(c in couplings(), th1 in -PI..PI, th2 in -PI..PI) {
        let (q_sq, q12) = quadrature_moments(c.chi1, c.chi2, th1, th2).unwrap();
        let state = simulate_couplings(&c, 0.0, None, None).unwrap().state;
        let scale = 1.0 + q_sq;
        prop_assert!((state.quadrature_covariance("cav1", th1, "cav1", th1).unwrap() - q_sq).abs() < 1e-9 * scale);
        prop_assert!((state.quadrature_covariance("cav2", th2, "cav2", th2).unwrap() - q_sq).abs() < 1e-9 * scale);
        prop_assert!((state.quadrature_covariance("cav1", th1, "cav2", th2).unwrap() - q12).abs() < 1e-9 * scale);
    }

    #[test]
    fn signal_formula_matches_beam_splitter_model(c in couplings(), th1 in -PI..PI, th2 in -PI..PI, kdt in 0.01f64..1.0) {
        let settings = HomodyneSettings { theta1: th1, theta2: th2, kappa_dt: kdt, t_grid: HomodyneSettings::uniform_grid(4.0, 0.25) };
        let trace = output_signal(&c, 1.0, &settings).unwrap();
        let state = simulate_couplings(&c, 0.0, None, None).unwrap().state;
        let model = attenuate_and_mix_signal(&state, "cav1", "cav2", &settings).unwrap();
        for (a, b) in trace.c.iter().zip(&model) {
            prop_assert!((a - b).abs() < 1e-9);
            prop_assert!(*a > 0.0 && *a <= 1.0 + 1e-12 || *a < 2.0);
        }
    }

    #[test]
    fn signal_bounds_at_matched_phase(r in 1.01f64..3.0, kdt in 0.01f64..1.0) {
        let settings = HomodyneSettings { kappa_dt: kdt, ..HomodyneSettings::default() };
        let trace = output_signal(&Couplings::unit_ratio(r).unwrap(), 1.0, &settings).unwrap();
        prop_assert!(trace.c.iter().all(|&c| c > 0.0 && c <= 1.0));
        prop_assert!(trace.c.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn vacuum_is_invariant_under_decay() {
    let c = Couplings::unit_ratio(2.0).unwrap();
    let dynamics = dynamics_from_couplings(Complex64::new(0.0, 0.0), Complex64::new(1e-300, 0.0), 0.7, true);
    let vac = GaussianState::vacuum_labeled(vec!["cav1".into(), "cav2".into(), "motion".into()]).unwrap();
    let out = evolve(&vac, &dynamics, 3.0).unwrap();
    assert!((out.cov() - vac.cov()).amax() < 1e-14);
    assert!(c.period().is_ok());
}
