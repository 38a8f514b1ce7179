//! Ground-state quantum geometric tensor over `(ε, φ)`.
//!
//! `Q_jk = ⟨∂_j u₀|(1 − |u₀⟩⟨u₀|)|∂_k u₀⟩`, with metric `g = Re Q` and Berry
//! curvature `F = −2 Im Q`. Three independent routes are provided: the
//! spectral sum over the even-parity sector, symmetric overlap stencils, and
//! the plaquette loop phase. The fidelity susceptibility and the variance
//! identity `g_φφ = Var(n̂)/4` give two further cross-checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::tensor_from_parts;
use crate::eigen::{cutoff_warnings, solve_sector, SectorSolution, Warning};
use crate::error::{Error, Result};
use crate::geometry::{self, infidelity, overlap};
use crate::model::{
    mean_photon, photon_variance, two_photon, BandedHermitian, ModelParams, Parity,
};

pub const DEFAULT_STEP_EPS: f64 = 1e-4;
pub const DEFAULT_STEP_PHI: f64 = 1e-3;
const PSD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Overlap,
    Plaquette,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Overlap => "overlap",
            Method::Plaquette => "plaquette",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QgtResult {
    /// Indexed `[j][k]` with `0 = ε`, `1 = φ`.
    pub q: [[Complex64; 2]; 2],
    pub gap: f64,
    pub mean_photon: f64,
    pub method: Method,
    pub params: ModelParams,
    pub warnings: Vec<Warning>,
}

impl QgtResult {
    pub fn g(&self) -> [[f64; 2]; 2] {
        [[self.q[0][0].re, self.q[0][1].re], [self.q[1][0].re, self.q[1][1].re]]
    }

    pub fn berry_f(&self) -> [[f64; 2]; 2] {
        [
            [0.0, -2.0 * self.q[0][1].im],
            [-2.0 * self.q[1][0].im, 0.0],
        ]
    }

    pub fn g_ee(&self) -> f64 {
        self.q[0][0].re
    }

    pub fn g_pp(&self) -> f64 {
        self.q[1][1].re
    }

    pub fn g_ep(&self) -> f64 {
        self.q[0][1].re
    }

    pub fn f_ep(&self) -> f64 {
        -2.0 * self.q[0][1].im
    }

    /// Hermiticity, positive semidefinite metric and vanishing diagonal curvature.
    pub fn check_invariants(&self) -> Result<()> {
        let q = &self.q;
        let scale = q[0][0].norm().max(q[1][1].norm()).max(1.0);
        if (q[0][1] - q[1][0].conj()).norm() > 1e-12 * scale
            || q[0][0].im != 0.0
            || q[1][1].im != 0.0
        {
            return Err(Error::InvalidParams("QGT is not Hermitian".into()));
        }
        let g = self.g();
        let tr = g[0][0] + g[1][1];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let min_eig = tr / 2.0 - ((tr / 2.0).powi(2) - det).max(0.0).sqrt();
        if min_eig < -PSD_TOLERANCE * scale {
            return Err(Error::InvalidParams(format!(
                "metric is not positive semidefinite (smallest eigenvalue {min_eig:e})"
            )));
        }
        Ok(())
    }
}

/// `∂_ε H` and `∂_φ H` as banded operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationOps {
    pub d_eps_h: BandedHermitian,
    pub d_phi_h: BandedHermitian,
}

impl PerturbationOps {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let dim = params.dim();
        let e = Complex64::from_polar(1.0, -params.phi);
        let band = |coef: Complex64| -> BandedHermitian {
            BandedHermitian {
                dim,
                diag: vec![0.0; dim],
                band2: (0..dim.saturating_sub(2)).map(|n| coef * two_photon(n)).collect(),
            }
        };
        Ok(Self {
            // −(δ/2)(e^{−iφ} a†² + h.c.)
            d_eps_h: band(-e * (params.delta / 2.0)),
            // (iδε/2)(e^{−iφ} a†² − h.c.)
            d_phi_h: band(Complex64::new(0.0, params.delta * params.eps / 2.0) * e),
        })
    }
}

/// Even-sector ground state on the full Fock basis at the parameters' φ.
pub(crate) fn even_ground_vector(params: &ModelParams) -> Result<Vec<Complex64>> {
    Ok(solve_sector(params, Parity::Even)?.fock_vector(0, params.dim(), params.phi))
}

/// Spectral sum over the even-parity sector:
/// `Q_jk = Σ_{n≠0} ⟨u₀|∂_j H|u_n⟩⟨u_n|∂_k H|u₀⟩ / (E_n − E₀)²`.
///
/// Cross-parity matrix elements of `∂H` vanish identically, so restricting
/// the sum to the sector of `u₀` is exact.
pub fn qgt_spectral(params: &ModelParams) -> Result<QgtResult> {
    let sector = solve_sector(params, Parity::Even)?;
    qgt_spectral_from_sector(params, &sector)
}

pub fn qgt_spectral_from_sector(params: &ModelParams, sector: &SectorSolution) -> Result<QgtResult> {
    let dim = params.dim();
    let ops = PerturbationOps::new(params)?;
    let u0 = sector.fock_vector(0, dim, params.phi);
    let warnings = cutoff_warnings(&u0);

    // Pull ∂_j H |u₀⟩ back to real sector coordinates: w̃[m] = e^{+i n φ/2} w[n].
    let pull_back = |w: Vec<Complex64>| -> (Vec<f64>, Vec<f64>) {
        sector
            .block
            .index_map
            .iter()
            .map(|&n| w[n] * crate::model::gauge_phase(n, params.phi).conj())
            .map(|z| (z.re, z.im))
            .unzip()
    };
    let (we_re, we_im) = pull_back(ops.d_eps_h.apply(&u0));
    let (wp_re, wp_im) = pull_back(ops.d_phi_h.apply(&u0));

    let e0 = sector.spectrum.eigenvalues[0];
    let mut q = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (k, v) in sector.spectrum.vectors().enumerate().skip(1) {
        let dot = |w: &[f64]| -> f64 { v.iter().zip(w).map(|(a, b)| a * b).sum() };
        let me = Complex64::new(dot(&we_re), dot(&we_im));
        let mp = Complex64::new(dot(&wp_re), dot(&wp_im));
        let denom = (sector.spectrum.eigenvalues[k] - e0).powi(2);
        let m = [me, mp];
        for j in 0..2 {
            for l in 0..2 {
                q[j][l] += m[j].conj() * m[l] / denom;
            }
        }
    }
    q[0][0].im = 0.0;
    q[1][1].im = 0.0;
    q[1][0] = q[0][1].conj();

    let result = QgtResult {
        q,
        gap: sector.gap(),
        mean_photon: mean_photon(&u0)?,
        method: Method::Spectral,
        params: *params,
        warnings,
    };
    result.check_invariants()?;
    Ok(result)
}

fn ground_family(params: ModelParams) -> impl Fn(f64, f64) -> Result<Vec<Complex64>> {
    move |eps, phi| even_ground_vector(&params.at(eps, phi))
}

/// Real metric from gauge-invariant overlap stencils with Richardson steps.
pub fn metric_overlap(params: &ModelParams, step_eps: f64, step_phi: f64) -> Result<[[f64; 2]; 2]> {
    params.validate()?;
    geometry::metric(&ground_family(*params), params.eps, params.phi, step_eps, step_phi)
}

/// Berry curvature `F_εφ` from the plaquette loop phase.
pub fn berry_plaquette(params: &ModelParams, step_eps: f64, step_phi: f64) -> Result<f64> {
    params.validate()?;
    geometry::plaquette_curvature(&ground_family(*params), params.eps, params.phi, step_eps, step_phi)
}

/// QGT assembled from the overlap metric and the plaquette curvature.
pub fn qgt_finite_difference(params: &ModelParams, step_eps: f64, step_phi: f64) -> Result<QgtResult> {
    let g = metric_overlap(params, step_eps, step_phi)?;
    let f = berry_plaquette(params, step_eps, step_phi)?;
    let sector = solve_sector(params, Parity::Even)?;
    let u0 = sector.fock_vector(0, params.dim(), params.phi);
    let mut q = tensor_from_parts(g, f);
    q[1][0] = q[0][1].conj();
    Ok(QgtResult {
        q,
        gap: sector.gap(),
        mean_photon: mean_photon(&u0)?,
        method: Method::Overlap,
        params: *params,
        warnings: cutoff_warnings(&u0),
    })
}

/// Ground-state fidelity `|⟨u₀(ε_a)|u₀(ε_b)⟩|` at fixed φ.
pub fn fidelity(params: &ModelParams, eps_a: f64, eps_b: f64) -> Result<f64> {
    let a = even_ground_vector(&params.at(eps_a, params.phi))?;
    let b = even_ground_vector(&params.at(eps_b, params.phi))?;
    Ok(overlap(&a, &b).norm())
}

fn chi_at_step(params: &ModelParams, step: f64) -> Result<f64> {
    let a = even_ground_vector(&params.at(params.eps - step / 2.0, params.phi))?;
    let b = even_ground_vector(&params.at(params.eps + step / 2.0, params.phi))?;
    let inf = infidelity(&a, &b);
    if inf < geometry::MIN_INFIDELITY {
        return Err(Error::PrecisionLoss { infidelity: inf });
    }
    Ok(-2.0 * (-inf).ln_1p() / (step * step))
}

/// Fidelity susceptibility `χ_F = −2 ln F / δε²` for the pair
/// `(ε − δε/2, ε + δε/2)`, refined by Richardson over `δε` and `δε/2`.
pub fn fidelity_susceptibility(params: &ModelParams, step_eps: f64) -> Result<f64> {
    params.validate()?;
    let coarse = chi_at_step(params, step_eps)?;
    let fine = chi_at_step(params, step_eps / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `Var(n̂)/4` on the even-sector ground state; equals `g_φφ` because the
/// drive phase is generated by `n̂/2`.
pub fn gphiphi_variance(params: &ModelParams) -> Result<f64> {
    Ok(photon_variance(&even_ground_vector(params)?)? / 4.0)
}
