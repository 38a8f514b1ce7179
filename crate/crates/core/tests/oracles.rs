use kerr_qgt_core::analytic::{
    normal_phase, normal_phase_qgt_limit, squeezed_vacuum_fock, superradiant_phase, symmetric_cat_fock, Branch,
};
use kerr_qgt_core::eigen::{ground_state, solve_sector};
use kerr_qgt_core::geometry::overlap;
use kerr_qgt_core::model::{mean_photon, rho, ModelParams, Parity};
use kerr_qgt_core::qgt::qgt_spectral;

#[test]
fn normal_phase_ground_state_is_squeezed_vacuum() {
    for &(l, eps, phi) in &[(2000.0, 0.3, 0.0), (2000.0, 0.6, 1.1), (2000.0, 0.8, 2.0), (500.0, 0.6, 0.0)] {
        let p = ModelParams::with_size(l, eps, phi, 300).unwrap();
        let even = solve_sector(&p, Parity::Even).unwrap();
        let odd = solve_sector(&p, Parity::Odd).unwrap();
        let oracle = normal_phase(1.0, eps, phi).unwrap();
        let u = even.fock_vector(0, p.dim(), phi);
        let fid = overlap(&u, &squeezed_vacuum_fock(oracle.r_n, 300).unwrap()).norm();
        assert!(fid > 0.999, "fidelity {fid} at L={l} eps={eps}");
        // Lowest excitation is the odd-sector ground state, one quantum up.
        let gap = odd.spectrum.eigenvalues[0] - even.spectrum.eigenvalues[0];
        assert!((gap / oracle.omega_e - 1.0).abs() < 0.05, "gap {gap} vs {}", oracle.omega_e);
        assert!((even.gap() / (2.0 * oracle.omega_e) - 1.0).abs() < 0.05);
    }
}

#[test]
fn superradiant_ground_state_is_symmetric_cat() {
    for &(l, eps, phi) in &[(200.0, 1.5, 0.0), (200.0, 2.0, 0.7), (500.0, 1.3, 0.0), (100.0, 1.5, 2.5)] {
        let n_cut = 600;
        let p = ModelParams::with_size(l, eps, phi, n_cut).unwrap();
        let even = solve_sector(&p, Parity::Even).unwrap();
        let oracle = superradiant_phase(1.0, eps, phi, l, Branch::Plus).unwrap();
        let cat = symmetric_cat_fock(oracle.alpha, oracle.r_s, n_cut).unwrap();
        let fid = overlap(&even.fock_vector(0, p.dim(), phi), &cat).norm();
        assert!(fid > 0.99, "fidelity {fid} at L={l} eps={eps}");
        assert!((even.gap() / oracle.omega_e - 1.0).abs() < 0.05);
    }
}

#[test]
fn zero_drive_closed_forms() {
    for &(delta, kerr) in &[(1.0, 0.01), (1.3, 0.05), (0.7, 0.0), (2.0, 0.4)] {
        let q = qgt_spectral(&ModelParams::new(delta, kerr, 0.0, 0.8, 50).unwrap()).unwrap();
        let expected = delta * delta / (2.0 * (2.0 * delta + 2.0 * kerr).powi(2));
        assert!((q.g_ee() - expected).abs() < 1e-10);
        assert!(q.g_pp().abs() < 1e-10);
        assert!(q.f_ep().abs() < 1e-10);
        assert!(q.q[0][0].im == 0.0);
    }
}

#[test]
fn large_size_normal_phase_qgt_matches_squeezing_limit() {
    for &(eps, phi) in &[(0.2, 0.0), (0.5, 1.0), (0.7, 2.2)] {
        let q = qgt_spectral(&ModelParams::with_size(1e6, eps, phi, 200).unwrap()).unwrap();
        let lim = normal_phase_qgt_limit(eps, phi).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(q.g_ee(), lim[0][0].re) < 1e-4);
        assert!(rel(q.g_pp(), lim[1][1].re) < 1e-4);
        assert!(rel(q.f_ep(), -2.0 * lim[0][1].im) < 1e-4);
        // Closed forms in the same limit.
        let x = 1.0 - eps * eps;
        assert!(rel(q.g_ee(), 1.0 / (8.0 * x * x)) < 1e-4);
        assert!(rel(q.f_ep(), eps / (4.0 * x.powf(1.5))) < 1e-4);
        assert!(rel(q.g_pp(), (eps.atanh()).sinh().powi(2) / 8.0) < 1e-4);
    }
}

#[test]
fn photon_density_limits() {
    let p = ModelParams::with_size(2000.0, 1.3, 0.0, 500).unwrap();
    let gs = ground_state(&p).unwrap();
    assert!(gs.is_adequate());
    let r = rho(&gs.fock_vector, 2000.0).unwrap();
    assert!((r / 0.15 - 1.0).abs() < 0.05, "rho {r}");
    for eps in [0.0, 0.3, 0.6, 0.9] {
        let gs = ground_state(&ModelParams::with_size(2000.0, eps, 0.4, 200).unwrap()).unwrap();
        assert!(rho(&gs.fock_vector, 2000.0).unwrap() < 1e-3);
    }
}

#[test]
fn photon_number_is_phase_independent() {
    let base = mean_photon(&ground_state(&ModelParams::with_size(400.0, 1.2, 0.0, 300).unwrap()).unwrap().fock_vector).unwrap();
    for phi in [std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
        let gs = ground_state(&ModelParams::with_size(400.0, 1.2, phi, 300).unwrap()).unwrap();
        assert!((mean_photon(&gs.fock_vector).unwrap() - base).abs() < 1e-6 * base);
    }
}
