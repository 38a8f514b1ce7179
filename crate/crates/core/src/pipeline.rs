//! End-to-end finite-size-scaling studies. Grid points are evaluated in
//! parallel with rayon and merged in grid order, so results do not depend on
//! the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::Warning;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::qgt::{qgt_spectral, QgtResult};
use crate::scaling::{
    k0_report, locate_peak, scaling_report, CurveFamily, K0Inputs, K0Report, Observable, PeakData,
    ScalingOptions, ScalingReport,
};

/// Evenly spaced `steps` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub sizes: Vec<f64>,
    pub n_cut: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_steps: usize,
    pub phi: f64,
    pub options: ScalingOptions,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            sizes: vec![300.0, 400.0, 500.0, 600.0, 700.0],
            n_cut: 800,
            eps_min: 0.9,
            eps_max: 1.3,
            eps_steps: 201,
            phi: 0.0,
            options: ScalingOptions::default(),
        }
    }
}

impl ScalingConfig {
    pub fn eps_grid(&self) -> Vec<f64> {
        linspace(self.eps_min, self.eps_max, self.eps_steps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.len() < 4 {
            return Err(Error::InvalidParams("scaling needs at least 4 sizes".into()));
        }
        if self.eps_steps < 3 || !(self.eps_min < self.eps_max) {
            return Err(Error::InvalidParams("eps grid needs 3+ ordered points".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointWarning {
    pub size: f64,
    pub eps: f64,
    pub warning: Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub config: ScalingConfig,
    pub peaks: PeakData,
    pub g_family: CurveFamily,
    pub f_family: CurveFamily,
    pub report: ScalingReport,
    pub warnings: Vec<PointWarning>,
}

pub fn qgt_at(size: f64, eps: f64, phi: f64, n_cut: usize) -> Result<QgtResult> {
    qgt_spectral(&ModelParams::with_size(size, eps, phi, n_cut)?)
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |m, (i, &v)| if v > m.1 { (i, v) } else { m })
        .0
}

/// Peak of `observable` for one size, bracketed by the grid neighbours of
/// the grid maximum.
fn refine_peak(
    size: f64,
    grid: &[f64],
    row: &[f64],
    phi: f64,
    n_cut: usize,
    observable: impl Fn(&QgtResult) -> f64,
) -> Result<crate::scaling::Peak> {
    let i = argmax(row);
    if i == 0 || i + 1 == grid.len() {
        return Err(Error::Bracket { lo: grid[0], hi: grid[grid.len() - 1] });
    }
    locate_peak(
        |e| qgt_at(size, e, phi, n_cut).map(|q| observable(&q)),
        grid[i - 1],
        grid[i + 1],
    )
}

/// Grid scan over `ε` for every size, peak refinement, and the report.
pub fn scaling_study(config: &ScalingConfig) -> Result<ScalingStudy> {
    config.validate()?;
    let grid = config.eps_grid();
    let tasks: Vec<(usize, usize)> = (0..config.sizes.len())
        .flat_map(|s| (0..grid.len()).map(move |e| (s, e)))
        .collect();
    let points: Vec<QgtResult> = tasks
        .par_iter()
        .map(|&(s, e)| qgt_at(config.sizes[s], grid[e], config.phi, config.n_cut))
        .collect::<Result<_>>()?;

    let row = |s: usize, f: &dyn Fn(&QgtResult) -> f64| -> Vec<f64> {
        points[s * grid.len()..(s + 1) * grid.len()].iter().map(f).collect()
    };
    let g_rows: Vec<Vec<f64>> = (0..config.sizes.len()).map(|s| row(s, &|q| q.g_ee())).collect();
    let f_rows: Vec<Vec<f64>> = (0..config.sizes.len()).map(|s| row(s, &|q| q.f_ep().abs())).collect();

    let per_size: Vec<(f64, f64, f64, f64, f64, f64)> = (0..config.sizes.len())
        .into_par_iter()
        .map(|s| {
            let size = config.sizes[s];
            let g = refine_peak(size, &grid, &g_rows[s], config.phi, config.n_cut, |q| q.g_ee())?;
            let at = qgt_at(size, g.eps, config.phi, config.n_cut)?;
            let f = refine_peak(size, &grid, &f_rows[s], config.phi, config.n_cut, |q| q.f_ep().abs())?;
            Ok((g.eps, g.value, at.g_pp(), at.mean_photon, f.eps, f.value))
        })
        .collect::<Result<_>>()?;

    let peaks = PeakData {
        sizes: config.sizes.clone(),
        eps_c: per_size.iter().map(|p| p.0).collect(),
        g_ee_peak: per_size.iter().map(|p| p.1).collect(),
        g_pp_at_peak: per_size.iter().map(|p| p.2).collect(),
        mean_photon_at_peak: per_size.iter().map(|p| p.3).collect(),
        f_peak_eps: per_size.iter().map(|p| p.4).collect(),
        f_peak: per_size.iter().map(|p| p.5).collect(),
    };
    let g_family = CurveFamily::new(config.sizes.clone(), grid.clone(), g_rows, Observable::GEpsEps)?;
    let f_family = CurveFamily::new(config.sizes.clone(), grid.clone(), f_rows, Observable::FEpsPhi)?;
    let report = scaling_report(&peaks, &g_family, &f_family, &config.options)?;

    let warnings = tasks
        .iter()
        .zip(&points)
        .flat_map(|(&(s, e), q)| {
            let (size, eps) = (config.sizes[s], grid[e]);
            q.warnings.iter().map(move |w| PointWarning { size, eps, warning: *w })
        })
        .collect();

    Ok(ScalingStudy { config: config.clone(), peaks, g_family, f_family, report, warnings })
}

/// `K = 0` critical point.
pub const K0_EPS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct K0Study {
    pub report: K0Report,
    /// Cutoff flags per `N_cut`; kept in the fits, since the `K = 0` state
    /// at the critical point fills any finite cutoff.
    pub warnings: Vec<(usize, Warning)>,
}

/// `K = 0` QGT at `ε = 1` for each cutoff.
pub fn k0_points(ncut_list: &[usize]) -> Result<Vec<QgtResult>> {
    ncut_list
        .par_iter()
        .map(|&n| qgt_spectral(&ModelParams::new(1.0, 0.0, K0_EPS, 0.0, n)?))
        .collect()
}

/// Cutoff scaling at `K = 0` combined with the photon-number scaling of a
/// finished `K > 0` study.
pub fn k0_study(ncut_list: &[usize], study: &ScalingStudy) -> Result<K0Study> {
    if ncut_list.len() < 5 || !ncut_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParams("k0 needs 5+ increasing cutoffs".into()));
    }
    let points = k0_points(ncut_list)?;
    let inputs = K0Inputs {
        ncut_list: ncut_list.iter().map(|&n| n as f64).collect(),
        g_ee: points.iter().map(|q| q.g_ee()).collect(),
        f_ep: points.iter().map(|q| q.f_ep()).collect(),
        mean_photon: points.iter().map(|q| q.mean_photon).collect(),
        sizes: study.peaks.sizes.clone(),
        mean_photon_at_peak: study.peaks.mean_photon_at_peak.clone(),
        delta_ee: study.report.delta_ee,
        delta_ep: study.report.delta_ep,
    };
    let warnings = ncut_list
        .iter()
        .zip(&points)
        .flat_map(|(&n, q)| q.warnings.iter().map(move |w| (n, *w)))
        .collect();
    Ok(K0Study { report: k0_report(&inputs)?, warnings })
}
