//! Gauge-invariant finite-difference geometry of a state family `λ ↦ |u(λ)⟩`
//! over the coordinates `(ε, φ)`. Only moduli of overlaps and closed-loop
//! phases enter, so the arbitrary phase of each state drops out.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Infidelities below this cannot be resolved reliably in double precision.
pub const MIN_INFIDELITY: f64 = 1e-13;

/// Edge overlaps below this make the plaquette phase ambiguous.
pub const MIN_EDGE_OVERLAP: f64 = 0.5;

pub fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `1 − |⟨a|b⟩|` for normalized `a`, `b`.
///
/// Evaluated as `‖b − ⟨a|b⟩a‖² / (1 + |⟨a|b⟩|)`, which avoids the
/// cancellation in `1 − |⟨a|b⟩|` when the states are close.
pub fn infidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let o = overlap(a, b);
    let resid: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (y - o * x).norm_sqr())
        .sum();
    resid / (1.0 + o.norm())
}

fn resolved_infidelity(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    let inf = infidelity(a, b);
    if inf > 0.0 && inf < MIN_INFIDELITY {
        return Err(Error::PrecisionLoss { infidelity: inf });
    }
    Ok(inf)
}

/// Berry phase `−arg Π ⟨u_i|u_{i+1}⟩` around the closed loop of `states`.
pub fn loop_phase(states: &[Vec<Complex64>]) -> Result<f64> {
    let mut prod = Complex64::new(1.0, 0.0);
    for (i, a) in states.iter().enumerate() {
        let b = &states[(i + 1) % states.len()];
        let o = overlap(a, b);
        if o.norm() < MIN_EDGE_OVERLAP {
            return Err(Error::StepTooLarge { overlap: o.norm() });
        }
        prod *= o / o.norm();
    }
    Ok(-prod.arg())
}

/// Parametrized state family over `(ε, φ)`.
pub trait StateFamily {
    fn state(&self, eps: f64, phi: f64) -> Result<Vec<Complex64>>;
}

impl<F> StateFamily for F
where
    F: Fn(f64, f64) -> Result<Vec<Complex64>>,
{
    fn state(&self, eps: f64, phi: f64) -> Result<Vec<Complex64>> {
        self(eps, phi)
    }
}

/// `g(v, v)` from the symmetric stencil `λ ± v`:
/// `1 − |⟨u(λ−v)|u(λ+v)⟩| ≈ 2 g(v, v)`.
fn directional_metric(
    family: &impl StateFamily,
    eps: f64,
    phi: f64,
    dir: (f64, f64),
) -> Result<f64> {
    let a = family.state(eps - dir.0, phi - dir.1)?;
    let b = family.state(eps + dir.0, phi + dir.1)?;
    Ok(resolved_infidelity(&a, &b)? / 2.0)
}

/// Directional metric with one Richardson step over `v` and `v/2`.
fn directional_metric_richardson(
    family: &impl StateFamily,
    eps: f64,
    phi: f64,
    dir: (f64, f64),
) -> Result<f64> {
    let coarse = directional_metric(family, eps, phi, dir)?;
    let fine = directional_metric(family, eps, phi, (dir.0 / 2.0, dir.1 / 2.0))?;
    // fine ≈ coarse/4; the h² truncation error cancels.
    Ok((16.0 * fine - coarse) / 3.0)
}

/// Real 2×2 metric over `(ε, φ)` by symmetric overlap stencils.
///
/// The off-diagonal entry comes from polarization along `(h_ε, h_φ)`.
pub fn metric(
    family: &impl StateFamily,
    eps: f64,
    phi: f64,
    step_eps: f64,
    step_phi: f64,
) -> Result<[[f64; 2]; 2]> {
    let dee = directional_metric_richardson(family, eps, phi, (step_eps, 0.0))?;
    let dpp = directional_metric_richardson(family, eps, phi, (0.0, step_phi))?;
    let dmix = directional_metric_richardson(family, eps, phi, (step_eps, step_phi))?;
    let g_ee = dee / (step_eps * step_eps);
    let g_pp = dpp / (step_phi * step_phi);
    let g_ep = (dmix - dee - dpp) / (2.0 * step_eps * step_phi);
    Ok([[g_ee, g_ep], [g_ep, g_pp]])
}

/// Corners of the plaquette centred on `(ε, φ)`, counterclockwise in the
/// `(ε, φ)` plane when both steps are positive.
pub fn plaquette_corners(eps: f64, phi: f64, step_eps: f64, step_phi: f64) -> [(f64, f64); 4] {
    let (he, hp) = (step_eps / 2.0, step_phi / 2.0);
    [
        (eps - he, phi - hp),
        (eps + he, phi - hp),
        (eps + he, phi + hp),
        (eps - he, phi + hp),
    ]
}

/// Berry curvature `F_εφ` as loop phase over plaquette area.
pub fn plaquette_curvature(
    family: &impl StateFamily,
    eps: f64,
    phi: f64,
    step_eps: f64,
    step_phi: f64,
) -> Result<f64> {
    let states = plaquette_corners(eps, phi, step_eps, step_phi)
        .iter()
        .map(|&(e, p)| family.state(e, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(loop_phase(&states)? / (step_eps * step_phi))
}
