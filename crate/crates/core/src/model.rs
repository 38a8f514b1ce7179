//! Truncated Fock-space Hamiltonian of the two-photon driven Kerr resonator
//!
//! ```text
//! H = K a†²a² + δ a†a − (δε/2)(e^{−iφ} a†² + e^{iφ} a²)
//! ```
//!
//! on the basis `{|0⟩, …, |n_cut⟩}`. The drive only couples `n ↔ n ± 2`, so the
//! matrix splits into an even and an odd parity block. The diagonal unitary
//! `V(φ) = diag(e^{−i n φ/2})` maps `H(ε, 0)` onto `H(ε, φ)`, which lets every
//! block be stored as a real symmetric tridiagonal matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `‖ψ‖ − 1` accepted by the observables.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Number of top Fock levels whose weight is checked for cutoff adequacy.
pub const TAIL_LEVELS: usize = 10;

/// Maximum tail weight on the top [`TAIL_LEVELS`] levels of an adequate state.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Drive detuning δ.
    pub delta: f64,
    /// Kerr nonlinearity K.
    pub kerr: f64,
    /// Dimensionless drive amplitude ε.
    pub eps: f64,
    /// Drive phase φ.
    pub phi: f64,
    /// Highest retained Fock level; the basis has `n_cut + 1` states.
    pub n_cut: usize,
}

impl ModelParams {
    pub fn new(delta: f64, kerr: f64, eps: f64, phi: f64, n_cut: usize) -> Result<Self> {
        let p = Self {
            delta,
            kerr,
            eps,
            phi,
            n_cut,
        };
        p.validate()?;
        if eps < 0.0 {
            return Err(Error::InvalidParams(format!("eps must be >= 0, got {eps}")));
        }
        Ok(p)
    }

    /// Parameters at δ = 1 and K = 1/L.
    pub fn with_size(size: f64, eps: f64, phi: f64, n_cut: usize) -> Result<Self> {
        if !(size > 0.0 && size.is_finite()) {
            return Err(Error::InvalidParams(format!("L must be positive, got {size}")));
        }
        Self::new(1.0, 1.0 / size, eps, phi, n_cut)
    }

    /// Structural checks shared by every operation.
    ///
    /// A negative `eps` passes: finite-difference stencils may step across
    /// ε = 0, where `H(−ε, φ) = H(ε, φ + π)` is still a valid Hamiltonian.
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.kerr >= 0.0 && self.kerr.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "kerr must be >= 0, got {}",
                self.kerr
            )));
        }
        if !self.eps.is_finite() || !self.phi.is_finite() {
            return Err(Error::InvalidParams("eps and phi must be finite".into()));
        }
        if self.n_cut < 4 {
            return Err(Error::InvalidParams(format!(
                "n_cut must be >= 4, got {}",
                self.n_cut
            )));
        }
        Ok(())
    }

    /// Effective system size `L = δ/K`.
    pub fn size(&self) -> Result<f64> {
        if self.kerr == 0.0 {
            Err(Error::UndefinedSize)
        } else {
            Ok(self.delta / self.kerr)
        }
    }

    pub fn dim(&self) -> usize {
        self.n_cut + 1
    }

    pub fn at(&self, eps: f64, phi: f64) -> Self {
        Self { eps, phi, ..*self }
    }

    /// Diagonal matrix element `K n(n−1) + δ n`.
    pub fn diagonal(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.kerr * nf * (nf - 1.0) + self.delta * nf
    }

    /// Gauge-free coupling `⟨n+2|H|n⟩` at φ = 0.
    pub fn coupling(&self, n: usize) -> f64 {
        -(self.delta * self.eps / 2.0) * two_photon(n)
    }
}

/// `√((n+1)(n+2)) = ⟨n+2|a†²|n⟩`.
pub fn two_photon(n: usize) -> f64 {
    let nf = n as f64;
    ((nf + 1.0) * (nf + 2.0)).sqrt()
}

/// Hermitian matrix with nonzero entries only on offsets 0 and ±2.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedHermitian {
    pub dim: usize,
    pub diag: Vec<f64>,
    /// `band2[n] = ⟨n+2|H|n⟩`; the upper band is its conjugate.
    pub band2: Vec<Complex64>,
}

impl BandedHermitian {
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        if row == col {
            Complex64::new(self.diag[row], 0.0)
        } else if row == col + 2 {
            self.band2[col]
        } else if col == row + 2 {
            self.band2[row].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `H·v` in O(dim).
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        let mut out: Vec<Complex64> = self
            .diag
            .iter()
            .zip(v)
            .map(|(d, x)| x * d)
            .collect();
        for (n, b) in self.band2.iter().enumerate() {
            out[n + 2] += b * v[n];
            out[n] += b.conj() * v[n + 2];
        }
        out
    }

    /// `⟨v|H|v⟩` for a normalized `v`.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let hv = self.apply(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Dense row-major realization, for cross-validation only.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.entry(r, c)).collect())
            .collect()
    }
}

pub fn build_hamiltonian(params: &ModelParams) -> Result<BandedHermitian> {
    params.validate()?;
    let dim = params.dim();
    let phase = Complex64::from_polar(1.0, -params.phi);
    Ok(BandedHermitian {
        dim,
        diag: (0..dim).map(|n| params.diagonal(n)).collect(),
        band2: (0..dim.saturating_sub(2))
            .map(|n| phase * params.coupling(n))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// One parity sector of `H(ε, 0)` as a real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalBlock {
    pub parity: Parity,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    /// Sector index `m` → Fock level `n`.
    pub index_map: Vec<usize>,
}

impl TridiagonalBlock {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn from_parts(parity: Parity, diag: Vec<f64>, offdiag: Vec<f64>) -> Self {
        let index_map = (0..diag.len()).map(|m| 2 * m + parity.offset()).collect();
        Self {
            parity,
            diag,
            offdiag,
            index_map,
        }
    }

    /// `T·v` for a vector in sector coordinates.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        let mut out: Vec<f64> = self.diag.iter().zip(v).map(|(d, x)| d * x).collect();
        for m in 0..n.saturating_sub(1) {
            out[m] += self.offdiag[m] * v[m + 1];
            out[m + 1] += self.offdiag[m] * v[m];
        }
        out
    }
}

pub fn parity_block(params: &ModelParams, parity: Parity) -> Result<TridiagonalBlock> {
    params.validate()?;
    let index_map: Vec<usize> = (parity.offset()..=params.n_cut).step_by(2).collect();
    let diag = index_map.iter().map(|&n| params.diagonal(n)).collect();
    let offdiag = index_map
        .iter()
        .take(index_map.len().saturating_sub(1))
        .map(|&n| params.coupling(n))
        .collect();
    Ok(TridiagonalBlock {
        parity,
        diag,
        offdiag,
        index_map,
    })
}

/// Even and odd blocks. Independent of φ.
pub fn parity_blocks(params: &ModelParams) -> Result<(TridiagonalBlock, TridiagonalBlock)> {
    Ok((
        parity_block(params, Parity::Even)?,
        parity_block(params, Parity::Odd)?,
    ))
}

/// Multiplies component `n` by `e^{−i n φ/2}`.
pub fn apply_gauge_phases(state: &[Complex64], phi: f64) -> Vec<Complex64> {
    state
        .iter()
        .enumerate()
        .map(|(n, c)| c * gauge_phase(n, phi))
        .collect()
}

pub fn gauge_phase(n: usize, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, -(n as f64) * phi / 2.0)
}

/// Embeds a real sector vector into the full Fock basis at drive phase φ.
pub fn embed_sector(block: &TridiagonalBlock, v: &[f64], dim: usize, phi: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (&n, &x) in block.index_map.iter().zip(v) {
        out[n] = gauge_phase(n, phi) * x;
    }
    out
}

pub fn norm(state: &[Complex64]) -> f64 {
    state.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn check_normalized(state: &[Complex64]) -> Result<()> {
    let nrm = norm(state);
    if (nrm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm: nrm });
    }
    Ok(())
}

/// `⟨n̂⟩ = Σ n |c_n|²`.
pub fn mean_photon(state: &[Complex64]) -> Result<f64> {
    check_normalized(state)?;
    Ok(moments(state).0)
}

/// `Var(n̂)` of a normalized state.
pub fn photon_variance(state: &[Complex64]) -> Result<f64> {
    check_normalized(state)?;
    let (m1, m2) = moments(state);
    Ok((m2 - m1 * m1).max(0.0))
}

fn moments(state: &[Complex64]) -> (f64, f64) {
    state.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (n, c)| {
        let w = c.norm_sqr();
        let nf = n as f64;
        (m1 + nf * w, m2 + nf * nf * w)
    })
}

/// Order parameter `ρ = ⟨n̂⟩/L`.
pub fn rho(state: &[Complex64], size: f64) -> Result<f64> {
    if !(size > 0.0) {
        return Err(Error::InvalidParams(format!("L must be positive, got {size}")));
    }
    Ok(mean_photon(state)? / size)
}

/// Weight on the top [`TAIL_LEVELS`] Fock levels.
pub fn tail_weight(state: &[Complex64]) -> f64 {
    let start = state.len().saturating_sub(TAIL_LEVELS);
    state[start..].iter().map(|c| c.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hamiltonian_entries() {
        let p = ModelParams::new(1.0, 0.01, 1.0, 0.0, 10).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.dim, 11);
        assert_eq!(h.diag[0], 0.0);
        assert!((h.diag[4] - 4.12).abs() < 1e-14);

        let p0 = ModelParams::new(1.0, 0.0, 1.0, 0.0, 10).unwrap();
        let h0 = build_hamiltonian(&p0).unwrap();
        assert!((h0.band2[0].re + 0.5 * 2f64.sqrt()).abs() < 1e-14);
        assert!((h0.band2[2].re + 0.5 * 12f64.sqrt()).abs() < 1e-14);
        assert!((h0.band2[2].re + 1.73205).abs() < 1e-5);
    }

    #[test]
    fn dense_is_exactly_hermitian_and_banded() {
        let p = ModelParams::new(1.3, 0.02, 0.7, 1.1, 12).unwrap();
        let d = build_hamiltonian(&p).unwrap().to_dense();
        for r in 0..d.len() {
            for col in 0..d.len() {
                assert_eq!(d[r][col], d[col][r].conj());
                let off = r.abs_diff(col);
                if off != 0 && off != 2 {
                    assert_eq!(d[r][col], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn small_even_block() {
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.0, 4).unwrap();
        let (even, odd) = parity_blocks(&p).unwrap();
        assert_eq!(even.index_map, vec![0, 2, 4]);
        assert_eq!(even.diag, vec![0.0, 2.0, 4.0]);
        assert!((even.offdiag[0] + 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((even.offdiag[1] + 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(odd.index_map, vec![1, 3]);
    }

    #[test]
    fn blocks_diagonal_without_drive_and_phase_free() {
        let p = ModelParams::new(1.0, 0.01, 0.0, 0.0, 9).unwrap();
        let (even, odd) = parity_blocks(&p).unwrap();
        assert!(even.offdiag.iter().chain(&odd.offdiag).all(|&x| x == 0.0));
        let q = ModelParams::new(1.0, 0.01, 0.8, 0.0, 9).unwrap();
        for phi in [PI / 4.0, PI] {
            assert_eq!(parity_blocks(&q).unwrap(), parity_blocks(&q.at(0.8, phi)).unwrap());
        }
        let (e, o) = parity_blocks(&q).unwrap();
        assert!(e.offdiag.iter().chain(&o.offdiag).all(|&x| x <= 0.0));
    }

    #[test]
    fn parity_is_conserved() {
        let p = ModelParams::new(1.0, 0.03, 0.9, 0.4, 15).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let v: Vec<Complex64> = (0..16)
            .map(|n| if n % 2 == 0 { Complex64::new(n as f64 + 1.0, 0.5) } else { c(0.0) })
            .collect();
        let hv = h.apply(&v);
        assert!(hv.iter().skip(1).step_by(2).all(|x| *x == c(0.0)));
    }

    #[test]
    fn gauge_phases() {
        let v: Vec<Complex64> = (0..5).map(|n| c(n as f64)).collect();
        assert_eq!(apply_gauge_phases(&v, 0.0), v);
        let mut basis2 = vec![c(0.0); 5];
        basis2[2] = c(1.0);
        let out = apply_gauge_phases(&basis2, PI);
        assert!((out[2] - c(-1.0)).norm() < 1e-15);
        let w: Vec<Complex64> = (0..7).map(|n| Complex64::new(0.3 * n as f64, 1.0 - n as f64)).collect();
        assert!((norm(&apply_gauge_phases(&w, 2.1)) - norm(&w)).abs() < 1e-13);
    }

    #[test]
    fn gauge_rotation_conjugates_hamiltonian() {
        // V H(ε,0) V† = H(ε,φ) entrywise.
        let p = ModelParams::new(1.0, 0.05, 0.6, 0.0, 8).unwrap();
        let phi = 0.9;
        let h0 = build_hamiltonian(&p).unwrap().to_dense();
        let h = build_hamiltonian(&p.at(0.6, phi)).unwrap().to_dense();
        for r in 0..9 {
            for col in 0..9 {
                let rotated = gauge_phase(r, phi) * h0[r][col] * gauge_phase(col, phi).conj();
                assert!((rotated - h[r][col]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn photon_number() {
        let mut vac = vec![c(0.0); 6];
        vac[0] = c(1.0);
        assert_eq!(mean_photon(&vac).unwrap(), 0.0);
        let s = 0.5f64.sqrt();
        let mut cat = vec![c(0.0); 6];
        cat[0] = c(s);
        cat[2] = c(s);
        assert!((mean_photon(&cat).unwrap() - 1.0).abs() < 1e-15);
        assert!((rho(&cat, 4.0).unwrap() - 0.25).abs() < 1e-15);
        let bad = vec![c(1.0), c(1.0)];
        assert!(matches!(mean_photon(&bad), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn size_requires_kerr() {
        let p = ModelParams::new(1.0, 0.0, 0.5, 0.0, 10).unwrap();
        assert_eq!(p.size(), Err(Error::UndefinedSize));
        assert_eq!(ModelParams::with_size(500.0, 0.5, 0.0, 10).unwrap().size().unwrap(), 500.0);
        assert!(ModelParams::new(0.0, 0.1, 0.5, 0.0, 10).is_err());
        assert!(ModelParams::new(1.0, -0.1, 0.5, 0.0, 10).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.5, 0.0, 3).is_err());
        assert!(ModelParams::new(1.0, 0.1, -0.5, 0.0, 10).is_err());
    }
}
