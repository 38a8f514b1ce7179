//! Closed-form large-L solutions in the normal (ε < 1) and superradiant
//! (ε > 1) phases, and their realizations in the Fock basis. These are
//! independent of the diagonalization pipeline and serve as its oracles.
//!
//! Squeezing follows `S(r) = exp((r* a² − r a†²)/2)` and displacement
//! `D(α) = exp(α a† − α* a)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry;
use crate::model::{tail_weight, TAIL_TOLERANCE};

/// `|r|` above which the squeezed-vacuum expansion is not attempted.
pub const MAX_SQUEEZING: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPhaseSolution {
    pub r_n: Complex64,
    pub omega_e: f64,
    pub omega_g: f64,
}

pub fn normal_phase(delta: f64, eps: f64, phi: f64) -> Result<NormalPhaseSolution> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfDomain(format!(
            "normal phase needs 0 <= eps < 1, got {eps}"
        )));
    }
    let root = (1.0 - eps * eps).sqrt();
    Ok(NormalPhaseSolution {
        r_n: Complex64::from_polar(0.25 * ((1.0 - eps) / (1.0 + eps)).ln(), -phi),
        omega_e: delta * root,
        omega_g: delta * (root - 1.0) / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperradiantSolution {
    pub alpha: Complex64,
    pub r_s: Complex64,
    pub omega_e: f64,
    /// Ground-energy constant as printed for this phase; not used as an oracle.
    pub omega_g: f64,
    pub branch: Branch,
}

pub fn superradiant_phase(
    delta: f64,
    eps: f64,
    phi: f64,
    size: f64,
    branch: Branch,
) -> Result<SuperradiantSolution> {
    if !(eps > 1.0 && eps.is_finite()) {
        return Err(Error::OutOfDomain(format!(
            "superradiant phase needs eps > 1, got {eps}"
        )));
    }
    if !(size > 0.0) {
        return Err(Error::OutOfDomain(format!("L must be positive, got {size}")));
    }
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let root = (eps * (eps - 1.0)).sqrt();
    Ok(SuperradiantSolution {
        alpha: Complex64::from_polar(sign * (size * (eps - 1.0) / 2.0).sqrt(), -phi / 2.0),
        r_s: Complex64::from_polar(0.25 * ((eps - 1.0) / eps).ln(), -phi),
        omega_e: 2.0 * delta * root,
        omega_g: delta * (root - eps + 0.5) - size * delta * delta * (eps - 1.0).powi(2) / 4.0,
        branch,
    })
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in v.iter_mut() {
        *c /= n;
    }
}

fn check_tail(v: &[Complex64], n_cut: usize) -> Result<()> {
    let tail = tail_weight(v);
    if tail > TAIL_TOLERANCE {
        return Err(Error::RangeError { tail, n_cut });
    }
    Ok(())
}

/// Unnormalized squeezed vacuum on `{|0⟩, …, |n_cut⟩}` from the two-term
/// recurrence `c_{2m+2} = t √((2m+1)/(2m+2)) c_{2m}`, `t = −e^{iθ} tanh|r|`.
fn squeezed_amplitudes(r: Complex64, n_cut: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n_cut + 1];
    let t = if r.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        -(r / r.norm()) * r.norm().tanh()
    };
    v[0] = Complex64::new(1.0 / r.norm().cosh().sqrt(), 0.0);
    let mut m = 0;
    while 2 * m + 2 <= n_cut {
        let ratio = ((2 * m + 1) as f64 / (2 * m + 2) as f64).sqrt();
        v[2 * m + 2] = v[2 * m] * t * ratio;
        m += 1;
    }
    v
}

/// `S(r)|0⟩` in the Fock basis up to level `n_cut`.
pub fn squeezed_vacuum_fock(r: Complex64, n_cut: usize) -> Result<Vec<Complex64>> {
    if !(r.norm() < MAX_SQUEEZING) {
        return Err(Error::OutOfDomain(format!("|r| = {} exceeds {MAX_SQUEEZING}", r.norm())));
    }
    let mut v = squeezed_amplitudes(r, n_cut);
    check_tail(&v, n_cut)?;
    normalize(&mut v);
    Ok(v)
}

/// `exp(α a† − α* a) v` on a truncated basis, by substepping a Taylor series
/// of the tridiagonal generator until each substep has norm ≤ 1/2.
fn displace(v: &[Complex64], alpha: Complex64) -> Vec<Complex64> {
    let dim = v.len();
    let sq: Vec<f64> = (0..=dim).map(|n| (n as f64).sqrt()).collect();
    let bound = 2.0 * alpha.norm() * sq[dim];
    let steps = (bound / 0.5).ceil().max(1.0) as usize;
    let a = alpha / steps as f64;
    let generator = |x: &[Complex64]| -> Vec<Complex64> {
        (0..dim)
            .map(|n| {
                let mut y = Complex64::new(0.0, 0.0);
                if n > 0 {
                    y += a * sq[n] * x[n - 1];
                }
                if n + 1 < dim {
                    y -= a.conj() * sq[n + 1] * x[n + 1];
                }
                y
            })
            .collect()
    };
    let mut state = v.to_vec();
    for _ in 0..steps {
        let mut term = state.clone();
        let mut acc = state.clone();
        for k in 1..40 {
            term = generator(&term);
            let inv = 1.0 / k as f64;
            let mut tnorm = 0.0;
            for (t, s) in term.iter_mut().zip(acc.iter_mut()) {
                *t *= inv;
                *s += *t;
                tnorm += t.norm_sqr();
            }
            if tnorm < 1e-36 {
                break;
            }
        }
        state = acc;
    }
    state
}

/// `D(α) S(r)|0⟩` up to level `n_cut`.
///
/// Built on an internal basis 1.5× larger, then truncated and checked for
/// tail weight.
pub fn displaced_squeezed_fock(
    alpha: Complex64,
    r: Complex64,
    n_cut: usize,
) -> Result<Vec<Complex64>> {
    if alpha.norm() == 0.0 {
        return squeezed_vacuum_fock(r, n_cut);
    }
    if !(r.norm() < MAX_SQUEEZING) {
        return Err(Error::OutOfDomain(format!("|r| = {} exceeds {MAX_SQUEEZING}", r.norm())));
    }
    let inner = (1.5 * n_cut as f64).ceil() as usize;
    let sq = squeezed_amplitudes(r, inner);
    check_tail(&sq, inner)?;
    let mut full = displace(&sq, alpha);
    full.truncate(n_cut + 1);
    check_tail(&full, n_cut)?;
    normalize(&mut full);
    Ok(full)
}

/// Normalized `(D(α) + D(−α)) S(r)|0⟩`, the even-parity superradiant state.
pub fn symmetric_cat_fock(alpha: Complex64, r: Complex64, n_cut: usize) -> Result<Vec<Complex64>> {
    let plus = displaced_squeezed_fock(alpha, r, n_cut)?;
    let minus = displaced_squeezed_fock(-alpha, r, n_cut)?;
    let mut v: Vec<Complex64> = plus.iter().zip(&minus).map(|(a, b)| a + b).collect();
    normalize(&mut v);
    Ok(v)
}

/// Fock level at which the squeezed vacuum for drive `eps` has decayed far
/// below double precision.
fn oracle_cutoff(eps: f64) -> usize {
    let t = (0.5 * eps.atanh()).tanh();
    if t <= 0.0 {
        return 16;
    }
    // |c_{2m}|² ~ t^{2m}: ask for ~1e-40 at the edge.
    let m = (92.0 / (-2.0 * t.ln())).ceil() as usize;
    (2 * m + 16).clamp(16, 20_000)
}

/// Large-L quantum geometric tensor of the normal phase.
///
/// Computed by overlap finite differences on the analytic family
/// `ε, φ ↦ S(r_n(ε, φ))|0⟩`; independent of any diagonalization. Returns
/// the 2×2 complex tensor over `(ε, φ)`.
pub fn normal_phase_qgt_limit(eps: f64, phi: f64) -> Result<[[Complex64; 2]; 2]> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfDomain(format!(
            "normal phase needs 0 <= eps < 1, got {eps}"
        )));
    }
    let step = 1e-4_f64.min((1.0 - eps) / 10.0);
    let n_cut = oracle_cutoff((eps + 2.0 * step).min(0.999_999));
    // r_n is analytic through ε = 0, so stencils may step below it.
    let family = |e: f64, p: f64| -> Result<Vec<Complex64>> {
        let r = Complex64::from_polar(0.25 * ((1.0 - e) / (1.0 + e)).ln(), -p);
        squeezed_vacuum_fock(r, n_cut)
    };
    let g = geometry::metric(&family, eps, phi, step, 1e-3)?;
    let f = geometry::plaquette_curvature(&family, eps, phi, step, 1e-3)?;
    Ok(tensor_from_parts(g, f))
}

/// `Q = g − (i/2) F` for a 2×2 metric and curvature `F_εφ`.
pub fn tensor_from_parts(g: [[f64; 2]; 2], f_ep: f64) -> [[Complex64; 2]; 2] {
    [
        [Complex64::new(g[0][0], 0.0), Complex64::new(g[0][1], -f_ep / 2.0)],
        [Complex64::new(g[1][0], f_ep / 2.0), Complex64::new(g[1][1], 0.0)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mean_photon;

    #[test]
    fn normal_phase_values() {
        let s = normal_phase(1.0, 0.6, 0.0).unwrap();
        assert!((s.omega_e - 0.8).abs() < 1e-15);
        assert!((s.omega_g + 0.1).abs() < 1e-15);
        assert!((s.r_n.re + 0.34657).abs() < 1e-5);
        assert!((s.r_n.re - 0.25 * 0.25f64.ln()).abs() < 1e-15);
        let z = normal_phase(1.0, 0.0, 0.3).unwrap();
        assert_eq!(z.omega_e, 1.0);
        assert_eq!(z.r_n.norm(), 0.0);
        assert!(normal_phase(1.0, 1.0, 0.0).is_err());
        // Real part is negative for 0 < ε < 1.
        assert!(normal_phase(1.0, 0.3, 0.0).unwrap().r_n.re < 0.0);
    }

    #[test]
    fn superradiant_values() {
        let s = superradiant_phase(1.0, 2.0, 0.0, 8.0, Branch::Plus).unwrap();
        assert!((s.alpha.re - 2.0).abs() < 1e-15);
        assert!((s.omega_e - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((s.r_s.re + 0.17329).abs() < 1e-5);
        let m = superradiant_phase(1.0, 2.0, 0.0, 8.0, Branch::Minus).unwrap();
        assert_eq!(m.alpha, -s.alpha);
        let p = superradiant_phase(1.0, 1.7, 0.9, 40.0, Branch::Plus).unwrap();
        assert!((p.alpha.norm_sqr() - 40.0 * 0.7 / 2.0).abs() < 1e-12);
        assert!(superradiant_phase(1.0, 1.0, 0.0, 8.0, Branch::Plus).is_err());
    }

    #[test]
    fn squeezed_vacuum() {
        let vac = squeezed_vacuum_fock(Complex64::new(0.0, 0.0), 20).unwrap();
        assert_eq!(vac[0], Complex64::new(1.0, 0.0));
        assert!(vac[1..].iter().all(|c| c.norm() == 0.0));

        let r = Complex64::new(0.25 * 0.25f64.ln(), 0.0);
        let v = squeezed_vacuum_fock(r, 200).unwrap();
        assert!(v.iter().skip(1).step_by(2).all(|c| c.norm() == 0.0));
        // Brute-force Fock sum against sinh²|r|.
        let brute: f64 = v.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum();
        assert!((brute - r.norm().sinh().powi(2)).abs() < 1e-10);
        assert!((brute - 0.125).abs() < 1e-10);

        assert!(matches!(
            squeezed_vacuum_fock(Complex64::new(-3.0, 0.0), 40),
            Err(Error::RangeError { .. })
        ));
        assert!(squeezed_vacuum_fock(Complex64::new(-5.5, 0.0), 40).is_err());
    }

    #[test]
    fn coherent_and_displaced_squeezed() {
        let coh = displaced_squeezed_fock(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 60).unwrap();
        assert!((coh[0].norm_sqr() - (-1f64).exp()).abs() < 1e-12);
        assert!((coh[0].norm_sqr() - 0.36788).abs() < 1e-5);

        let r = Complex64::new(0.25 * 0.5f64.ln(), 0.0);
        let v = displaced_squeezed_fock(Complex64::new(2.0, 0.0), r, 200).unwrap();
        let brute: f64 = v.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum();
        let expected = 4.0 + r.norm().sinh().powi(2);
        assert!((brute - expected).abs() < 1e-8);
        assert!((brute - 4.03033).abs() < 1e-5);

        let z = displaced_squeezed_fock(Complex64::new(0.0, 0.0), r, 50).unwrap();
        assert_eq!(z, squeezed_vacuum_fock(r, 50).unwrap());
    }

    #[test]
    fn displaced_state_with_phase() {
        let alpha = Complex64::from_polar(3.0, -0.4);
        let r = Complex64::from_polar(-0.2, -0.8);
        let v = displaced_squeezed_fock(alpha, r, 300).unwrap();
        let n = mean_photon(&v).unwrap();
        assert!((n - 9.0 - 0.2f64.sinh().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn normal_phase_qgt_endpoints() {
        let q = normal_phase_qgt_limit(0.0, 0.0).unwrap();
        assert!((q[0][0].re - 0.125).abs() < 1e-6);
        assert!(q[1][1].re.abs() < 1e-10);
        assert!(q[0][1].im.abs() < 1e-8);
        assert!(normal_phase_qgt_limit(1.0, 0.0).is_err());
    }

    #[test]
    fn normal_phase_qgt_closed_forms() {
        // Candidate closed forms checked against the finite-difference oracle.
        for &(eps, phi) in &[(0.3, 0.0), (0.6, 0.0), (0.6, 1.2), (0.85, 2.5)] {
            let q = normal_phase_qgt_limit(eps, phi).unwrap();
            let one = 1.0 - eps * eps;
            let rn = 0.5 * f64::atanh(eps);
            let g_ee = 1.0 / (8.0 * one * one);
            let g_pp = (2.0 * rn).sinh().powi(2) / 8.0;
            let f_ep = eps / (4.0 * one.powf(1.5));
            assert!((q[0][0].re / g_ee - 1.0).abs() < 1e-6, "g_ee at {eps}");
            assert!((q[1][1].re / g_pp - 1.0).abs() < 1e-6, "g_pp at {eps}");
            assert!(((-2.0 * q[0][1].im).abs() / f_ep - 1.0).abs() < 1e-4, "F at {eps}");
        }
        let q = normal_phase_qgt_limit(0.6, 0.0).unwrap();
        assert!((q[0][0].re - 0.30518).abs() < 1e-5);
        assert!((q[1][1].re - 0.07031).abs() < 1e-5);
    }
}
