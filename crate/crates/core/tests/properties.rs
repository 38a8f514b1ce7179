use kerr_qgt_core::model::{build_hamiltonian, ModelParams};
use kerr_qgt_core::qgt::{
    berry_plaquette, fidelity_susceptibility, gphiphi_variance, metric_overlap, qgt_spectral, DEFAULT_STEP_EPS,
    DEFAULT_STEP_PHI,
};
use kerr_qgt_core::scaling::{collapse_objective, fit_power_law, CurveFamily, Observable};
use proptest::prelude::*;

fn cutoff(size: f64, eps: f64) -> usize {
    (size * (eps - 1.0).max(0.0) / 2.0 * 1.5 + 150.0) as usize
}

fn tensor_norm(q: &[[kerr_qgt_core::Complex64; 2]; 2]) -> f64 {
    q.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn hamiltonian_is_hermitian(kerr in 0.0f64..0.1, eps in 0.0f64..2.0, phi in -7.0f64..7.0, n_cut in 2usize..40) {
        let h = build_hamiltonian(&ModelParams::new(1.0, kerr, eps, phi, n_cut).unwrap()).unwrap().to_dense();
        for r in 0..=n_cut {
            for c in 0..=n_cut {
                prop_assert_eq!(h[r][c], h[c][r].conj());
            }
        }
    }

    #[test]
    fn qgt_is_phase_independent(size in 50.0f64..800.0, eps in 0.0f64..1.8, phi in 0.0f64..6.3) {
        let n = cutoff(size, eps);
        let q0 = qgt_spectral(&ModelParams::with_size(size, eps, 0.0, n).unwrap()).unwrap();
        let q = qgt_spectral(&ModelParams::with_size(size, eps, phi, n).unwrap()).unwrap();
        let scale = tensor_norm(&q0.q).max(1e-300);
        for j in 0..2 {
            for k in 0..2 {
                prop_assert!((q.q[j][k].norm() - q0.q[j][k].norm()).abs() <= 1e-8 * scale);
            }
        }
    }

    #[test]
    fn tensor_invariants(size in 50.0f64..800.0, eps in 0.0f64..1.8, phi in 0.0f64..6.3) {
        let q = qgt_spectral(&ModelParams::with_size(size, eps, phi, cutoff(size, eps)).unwrap()).unwrap();
        prop_assert!(q.check_invariants().is_ok());
        let f = q.berry_f();
        prop_assert_eq!(f[0][0], 0.0);
        prop_assert_eq!(f[1][1], 0.0);
        prop_assert_eq!(f[0][1], -f[1][0]);
        prop_assert!(q.g_ee() >= 0.0 && q.g_pp() >= 0.0);
        // Curvature is half the slope of the photon number and never negative.
        prop_assert!(q.f_ep() >= -1e-12);
        prop_assert!(q.g_ep().abs() <= 1e-9 * tensor_norm(&q.q));
    }

    #[test]
    fn gphiphi_is_quarter_variance(size in 50.0f64..800.0, eps in 0.05f64..1.8, phi in 0.0f64..6.3) {
        let p = ModelParams::with_size(size, eps, phi, cutoff(size, eps)).unwrap();
        let g = qgt_spectral(&p).unwrap().g_pp();
        let v = gphiphi_variance(&p).unwrap();
        prop_assert!((g - v).abs() <= 1e-9 * v.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn method_triangle(size in 100.0f64..1000.0, eps in prop_oneof![0.1f64..0.8, 1.3f64..1.8], phi in 0.0f64..6.3) {
        let p = ModelParams::with_size(size, eps, phi, cutoff(size, eps)).unwrap();
        let s = qgt_spectral(&p).unwrap();
        let g = metric_overlap(&p, DEFAULT_STEP_EPS, DEFAULT_STEP_PHI).unwrap();
        let f = berry_plaquette(&p, DEFAULT_STEP_EPS, DEFAULT_STEP_PHI).unwrap();
        let scale = tensor_norm(&s.q);
        prop_assert!((g[0][0] - s.g_ee()).abs() <= 1e-4 * s.g_ee());
        prop_assert!((g[1][1] - s.g_pp()).abs() <= 1e-4 * s.g_pp());
        prop_assert!((g[0][1] - s.g_ep()).abs() <= 1e-4 * scale);
        prop_assert!((f - s.f_ep()).abs() <= 1e-4 * s.f_ep().abs());
    }

    #[test]
    fn susceptibility_is_diagonal_metric(size in 100.0f64..1000.0, eps in 0.1f64..1.8) {
        let p = ModelParams::with_size(size, eps, 0.3, cutoff(size, eps)).unwrap();
        let chi = fidelity_susceptibility(&p, DEFAULT_STEP_EPS).unwrap();
        let g = qgt_spectral(&p).unwrap().g_ee();
        prop_assert!((chi - g).abs() <= 1e-5 * g);
    }
}

proptest! {
    #[test]
    fn power_law_round_trip(p in -4.0f64..4.0, a in 0.01f64..100.0) {
        let x = [2.0f64, 3.0, 5.0, 8.0, 13.0];
        let y: Vec<f64> = x.iter().map(|v| a * v.powf(p)).collect();
        let f = fit_power_law(&x, &y).unwrap();
        prop_assert!((f.exponent - p).abs() < 1e-10);
        prop_assert!((f.prefactor / a - 1.0).abs() < 1e-10);
        let back: Vec<f64> = x.iter().map(|v| f.prefactor * v.powf(f.exponent)).collect();
        for (b, yy) in back.iter().zip(&y) {
            prop_assert!((b / yy - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn collapse_ignores_curve_order(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(), nu in 1.0f64..2.0) {
        let sizes = [50.0, 100.0, 200.0, 400.0];
        let grid: Vec<f64> = (0..41).map(|i| 0.9 + 0.005 * i as f64).collect();
        let curve = |l: f64| -> Vec<f64> {
            grid.iter().map(|e| l.powf(0.7) / (1.0 + ((e - 1.0) * l.powf(0.6)).powi(2)) + 1e-3 * (e * l).sin()).collect()
        };
        let fam = CurveFamily::new(sizes.to_vec(), grid.clone(), sizes.iter().map(|&l| curve(l)).collect(), Observable::GEpsEps).unwrap();
        let base = collapse_objective(&fam, 0.7, nu, 1.0).unwrap();
        // Struct literal on purpose: the objective must not rely on sorted curves.
        let fam2 = CurveFamily {
            sizes: perm.iter().map(|&i| sizes[i]).collect(),
            values: perm.iter().map(|&i| curve(sizes[i])).collect(),
            ..fam.clone()
        };
        prop_assert_eq!(base, collapse_objective(&fam2, 0.7, nu, 1.0).unwrap());
    }
}
