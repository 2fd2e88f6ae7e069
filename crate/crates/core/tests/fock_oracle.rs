use num_complex::Complex64;

use entpulse::fock::{self, FockState};
use entpulse::params::Couplings;
use entpulse::protocol::{oracle_check, simulate_couplings};

fn run_fock(c: &Couplings, dims: fock::Dims, start: FockState) -> fock::FockObservables {
    let h = fock::hamiltonian_matrix(c.chi1, c.chi2, dims).unwrap();
    let (psi, rep) = fock::evolve_exact(&start, &h, c.t_pi.unwrap(), 1e-10).unwrap();
    assert!(rep.max_norm_error < 1e-12, "{rep:?}");
    fock::observables(&psi)
}

#[test]
fn doubling_truncation_changes_nothing() {
    let c = Couplings::unit_ratio(3.0).unwrap();
    let dims = fock::default_dims(3.0, 1e-10).unwrap();
    let twice = dims.map(|d| 2 * d);
    let a = run_fock(&c, dims, FockState::vacuum(dims).unwrap());
    let b = run_fock(&c, twice, FockState::vacuum(twice).unwrap());
    for k in 0..3 {
        assert!((a.mean_photons[k] - b.mean_photons[k]).abs() < 1e-8);
    }
    assert!((&a.cov - &b.cov).amax() < 1e-8);
    assert!((a.epr_variance(0.0, 0.0) - b.epr_variance(0.0, 0.0)).abs() < 1e-8);
}

#[test]
fn complex_couplings_agree_with_gaussian() {
    let c = Couplings::from_chi(Complex64::new(0.6, -0.8), Complex64::new(-1.5, 2.0), None).unwrap();
    let dims = fock::default_dims(c.r, 1e-10).unwrap();
    let obs = run_fock(&c, dims, FockState::vacuum(dims).unwrap());
    let gauss = simulate_couplings(&c, 0.0, None, None).unwrap();
    assert!((&obs.cov - gauss.state.cov()).amax() < 1e-6);
    let beta = c.beta;
    let matched = gauss.state.epr_variance("cav1", "cav2", -beta, 0.0).unwrap();
    assert!((obs.epr_variance(-beta, 0.0) - matched).abs() < 1e-6);
}

#[test]
fn phonon_fock_state_leaves_cavity_moments_unchanged() {
    // a non-Gaussian motional start: |n_b = 2⟩
    let c = Couplings::unit_ratio(3.0).unwrap();
    let dims = [40, 36, 20];
    let vac = run_fock(&c, dims, FockState::vacuum(dims).unwrap());
    let excited = run_fock(&c, dims, FockState::basis(dims, [0, 0, 2]).unwrap());
    let cav = |o: &fock::FockObservables| o.cov.view((0, 0), (4, 4)).clone_owned();
    assert!((cav(&vac) - cav(&excited)).amax() < 1e-8);
    assert!((excited.motion_populations[2] - 1.0).abs() < 1e-8);
}

#[test]
fn pair_structure_of_output() {
    let r = 2.5f64;
    let c = Couplings::unit_ratio(r).unwrap();
    let dims = fock::default_dims(r, 1e-10).unwrap();
    let obs = run_fock(&c, dims, FockState::vacuum(dims).unwrap());
    assert!(obs.off_diagonal_weight() < 1e-8);
    let lambda = 2.0 * r / (1.0 + r * r);
    let p0 = obs.joint_cavity[(0, 0)];
    assert!((p0 - (1.0 - lambda * lambda)).abs() < 1e-9);
    for n in 1..8 {
        let ratio = obs.joint_cavity[(n, n)] / obs.joint_cavity[(n - 1, n - 1)];
        assert!((ratio - lambda * lambda).abs() < 1e-6, "n = {n}: {ratio}");
    }
}

#[test]
fn oracle_rejects_r_at_or_below_one() {
    assert!(oracle_check(1.0, None, 1e-10).is_err());
    assert!(oracle_check(0.5, None, 1e-10).is_err());
}
