use kerr_qgt_core::pipeline::{linspace, qgt_at};
use kerr_qgt_core::scaling::{collapse_objective, locate_peak, optimize_collapse, CurveFamily, Observable};

fn synthetic(sizes: &[f64], grid: Vec<f64>, delta: f64, nu: f64, eps_c: f64) -> CurveFamily {
    let values = sizes
        .iter()
        .map(|&l| {
            grid.iter()
                .map(|e| l.powf(delta) / (1.0 + ((e - eps_c) * l.powf(1.0 / nu)).powi(2)))
                .collect()
        })
        .collect();
    CurveFamily::new(sizes.to_vec(), grid, values, Observable::GEpsEps).unwrap()
}

#[test]
fn exact_family_collapses_perfectly() {
    // Linear interpolation error scales with the squared spacing of the pooled
    // abscissas, so the grid must be very fine.
    let fam = synthetic(&[1.0, 1.1, 1.2], linspace(0.5, 1.5, 200_001), 0.5, 1.5, 1.0);
    let q = collapse_objective(&fam, 0.5, 1.5, 1.0).unwrap();
    assert!(q < 1e-20, "quality {q}");
}

#[test]
fn wrong_exponent_spoils_collapse() {
    let fam = synthetic(&[50.0, 100.0, 200.0, 400.0], linspace(0.8, 1.2, 4001), 0.5, 1.5, 1.0);
    let best = collapse_objective(&fam, 0.5, 1.5, 1.0).unwrap();
    for nu in [1.35, 1.65] {
        let off = collapse_objective(&fam, 0.5, nu, 1.0).unwrap();
        assert!(off >= 10.0 * best, "nu={nu}: {off} vs {best}");
    }
}

#[test]
fn optimizer_recovers_synthetic_exponent() {
    let fam = synthetic(&[20.0, 40.0, 80.0, 160.0], linspace(0.5, 1.5, 2001), 0.5, 1.5, 1.0);
    let fit = optimize_collapse(&fam, 0.5, (1.2, 1.8), (0.98, 1.02)).unwrap();
    assert!((fit.nu / 1.5 - 1.0).abs() < 0.01, "nu {}", fit.nu);
    assert!((fit.eps_c_star - 1.0).abs() < 1e-3);
    assert!(!fit.at_boundary);
    let again = optimize_collapse(&fam, 0.5, (1.2, 1.8), (0.98, 1.02)).unwrap();
    assert_eq!(fit, again);
}

#[test]
fn optimizer_flags_out_of_range_optimum() {
    let fam = synthetic(&[20.0, 40.0, 80.0, 160.0], linspace(0.5, 1.5, 2001), 0.5, 1.5, 1.0);
    let fit = optimize_collapse(&fam, 0.5, (1.0, 1.2), (0.99, 1.01)).unwrap();
    assert!(fit.at_boundary, "{fit:?}");
}

#[test]
fn refined_peak_matches_fine_grid_scan() {
    let g = |e: f64| qgt_at(300.0, e, 0.0, 800).map(|q| q.g_ee());
    let peak = locate_peak(g, 1.06, 1.085).unwrap();
    let grid = linspace(1.065, 1.08, 151);
    let scan: Vec<f64> = grid.iter().map(|&e| g(e).unwrap()).collect();
    let i = scan
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v > scan[best] { k } else { best });
    assert!(i > 0 && i + 1 < grid.len());
    assert!((peak.eps - grid[i]).abs() < 2e-4, "{} vs {}", peak.eps, grid[i]);
    assert!(peak.value >= scan[i]);
}
