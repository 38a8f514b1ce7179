//! Symmetric tridiagonal eigensolver and ground-state extraction.
//!
//! Blocks are diagonalized with the implicit-shift QL algorithm (Wilkinson
//! shift, Givens chasing) accumulating the full eigenvector set. A cyclic
//! Jacobi solver on dense matrices is kept as an independent cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    embed_sector, parity_block, tail_weight, ModelParams, Parity, TridiagonalBlock,
    TAIL_TOLERANCE,
};

pub const MAX_SWEEPS: usize = 50;
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column-major: eigenvector `k` occupies `[k·n, (k+1)·n)`.
    eigenvectors: Vec<f64>,
    pub max_residual: f64,
    pub max_orthogonality_defect: f64,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.dim();
        &self.eigenvectors[k * n..(k + 1) * n]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.eigenvectors.chunks_exact(self.dim().max(1))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Full eigendecomposition of a real symmetric tridiagonal block.
pub fn eig_tridiagonal(block: &TridiagonalBlock) -> Result<Spectrum> {
    let n = block.size();
    if block.offdiag.len() + 1 != n.max(1) {
        return Err(Error::InvalidParams(format!(
            "tridiagonal block of size {n} needs {} off-diagonal entries, got {}",
            n.saturating_sub(1),
            block.offdiag.len()
        )));
    }
    let mut d = block.diag.clone();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&block.offdiag);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    sweeps: MAX_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (lo, hi) = z.split_at_mut((i + 1) * n);
                let zi = &mut lo[i * n..];
                let zi1 = &mut hi[..n];
                for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Selection sort keeps the column swaps at O(n²).
    for i in 0..n {
        let k = (i..n)
            .min_by(|&a, &b| d[a].total_cmp(&d[b]))
            .unwrap_or(i);
        if k != i {
            d.swap(i, k);
            let (lo, hi) = z.split_at_mut(k * n);
            lo[i * n..(i + 1) * n].swap_with_slice(&mut hi[..n]);
        }
    }

    let mut max_residual: f64 = 0.0;
    for (k, v) in z.chunks_exact(n.max(1)).enumerate().take(n) {
        let tv = block.apply(v);
        let res = tv
            .iter()
            .zip(v)
            .map(|(t, x)| (t - d[k] * x).powi(2))
            .sum::<f64>()
            .sqrt();
        max_residual = max_residual.max(res);
    }
    let mut max_orth: f64 = 0.0;
    for j in 0..n {
        let vj = &z[j * n..(j + 1) * n];
        for k in 0..j {
            max_orth = max_orth.max(dot(vj, &z[k * n..(k + 1) * n]).abs());
        }
    }

    let scale = d.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    if max_residual > RESIDUAL_TOLERANCE * scale || max_orth > ORTHOGONALITY_TOLERANCE {
        return Err(Error::Inaccurate {
            residual: max_residual,
            orthogonality: max_orth,
        });
    }

    Ok(Spectrum {
        eigenvalues: d,
        eigenvectors: z,
        max_residual,
        max_orthogonality_defect: max_orth,
    })
}

/// Eigenvalues of a dense real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a dense Hermitian matrix via its real `2n` embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is that of `H` doubled.
pub fn dense_hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for r in 0..n {
        for c in 0..n {
            let z = h[r][c];
            m[r][c] = z.re;
            m[r + n][c + n] = z.re;
            m[r][c + n] = -z.im;
            m[r + n][c] = z.im;
        }
    }
    jacobi_eigenvalues(&m).into_iter().step_by(2).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorSolution {
    pub block: TridiagonalBlock,
    pub spectrum: Spectrum,
}

impl SectorSolution {
    /// Sector eigenvector `k` on the full Fock basis at drive phase φ.
    pub fn fock_vector(&self, k: usize, dim: usize, phi: f64) -> Vec<Complex64> {
        embed_sector(&self.block, &self.gauge_fixed(k), dim, phi)
    }

    /// Eigenvector `k` with its largest component made positive.
    pub fn gauge_fixed(&self, k: usize) -> Vec<f64> {
        let v = self.spectrum.vector(k);
        let pivot = v
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        if pivot < 0.0 {
            v.iter().map(|x| -x).collect()
        } else {
            v.to_vec()
        }
    }

    /// `E_1 − E_0` within the sector.
    pub fn gap(&self) -> f64 {
        let ev = &self.spectrum.eigenvalues;
        if ev.len() < 2 {
            f64::INFINITY
        } else {
            ev[1] - ev[0]
        }
    }
}

pub fn solve_sector(params: &ModelParams, parity: Parity) -> Result<SectorSolution> {
    let block = parity_block(params, parity)?;
    let spectrum = eig_tridiagonal(&block)?;
    Ok(SectorSolution { block, spectrum })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The top Fock levels carry more weight than [`TAIL_TOLERANCE`].
    CutoffInadequate { tail_weight: f64 },
}

pub fn cutoff_warnings(state: &[Complex64]) -> Vec<Warning> {
    let tail = tail_weight(state);
    if tail > TAIL_TOLERANCE {
        vec![Warning::CutoffInadequate { tail_weight: tail }]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub fock_vector: Vec<Complex64>,
    pub parity: Parity,
    /// `E_1 − E_0` inside the ground state's parity sector.
    pub gap: f64,
    pub even_energy: f64,
    pub odd_energy: f64,
    pub warnings: Vec<Warning>,
}

impl GroundState {
    pub fn is_adequate(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Lowest state over both parity sectors. Cross-sector ties within
/// [`DEGENERACY_TOLERANCE`] go to the even sector.
pub fn ground_state(params: &ModelParams) -> Result<GroundState> {
    let even = solve_sector(params, Parity::Even)?;
    let odd = solve_sector(params, Parity::Odd)?;
    let e0 = even.spectrum.eigenvalues[0];
    let o0 = odd.spectrum.eigenvalues[0];
    let scale = 1f64.max(e0.abs()).max(o0.abs());
    let chosen = if o0 < e0 && (e0 - o0) >= DEGENERACY_TOLERANCE * scale {
        &odd
    } else {
        &even
    };
    let fock_vector = chosen.fock_vector(0, params.dim(), params.phi);
    let warnings = cutoff_warnings(&fock_vector);
    Ok(GroundState {
        energy: chosen.spectrum.eigenvalues[0],
        parity: chosen.block.parity,
        gap: chosen.gap(),
        fock_vector,
        even_energy: e0,
        odd_energy: o0,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_block() {
        let b = TridiagonalBlock::from_parts(Parity::Even, vec![0.0, 2.0, 4.0], vec![0.0, 0.0]);
        let s = eig_tridiagonal(&b).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0, 2.0, 4.0]);
        for k in 0..3 {
            for i in 0..3 {
                assert_eq!(s.vector(k)[i].abs(), if i == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let b = TridiagonalBlock::from_parts(Parity::Even, vec![0.0, 2.0], vec![-1.0]);
        let s = eig_tridiagonal(&b).unwrap();
        assert!((s.eigenvalues[0] - (1.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((s.eigenvalues[1] - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        assert!((s.eigenvalues[0] + 0.41421).abs() < 1e-5);
    }

    #[test]
    fn undriven_even_block() {
        let p = ModelParams::new(1.0, 0.01, 0.0, 0.0, 20).unwrap();
        let s = solve_sector(&p, Parity::Even).unwrap();
        for (m, ev) in s.spectrum.eigenvalues.iter().enumerate() {
            let n = (2 * m) as f64;
            assert!((ev - (0.01 * n * (n - 1.0) + n)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_level_block() {
        let b = TridiagonalBlock::from_parts(Parity::Odd, vec![3.5], vec![]);
        let s = eig_tridiagonal(&b).unwrap();
        assert_eq!(s.eigenvalues, vec![3.5]);
        assert_eq!(s.vector(0), &[1.0]);
    }

    #[test]
    fn malformed_block_rejected() {
        let b = TridiagonalBlock::from_parts(Parity::Even, vec![1.0, 2.0], vec![]);
        assert!(eig_tridiagonal(&b).is_err());
    }

    #[test]
    fn non_finite_input_does_not_converge() {
        let b = TridiagonalBlock::from_parts(Parity::Even, vec![0.0, f64::NAN, 1.0], vec![1.0, 1.0]);
        assert!(eig_tridiagonal(&b).is_err());
    }

    #[test]
    fn vacuum_ground_state() {
        let p = ModelParams::new(1.0, 0.01, 0.0, 0.0, 40).unwrap();
        let gs = ground_state(&p).unwrap();
        assert_eq!(gs.energy, 0.0);
        assert_eq!(gs.parity, Parity::Even);
        assert!((gs.fock_vector[0].re - 1.0).abs() < 1e-15);
        assert!((gs.gap - 2.02).abs() < 1e-14);
        assert!(gs.is_adequate());
    }

    #[test]
    fn jacobi_matches_closed_form() {
        let ev = jacobi_eigenvalues(&[vec![0.0, -1.0], vec![-1.0, 2.0]]);
        assert!((ev[0] - (1.0 - 2f64.sqrt())).abs() < 1e-14);
        let h = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
        ];
        let ev = dense_hermitian_eigenvalues(&h);
        assert!((ev[0]).abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
    }
}
