//! Finite-size-scaling fitters: peak location, critical-point extrapolation,
//! power laws, data collapse and scaling-dimension bookkeeping.
//!
//! Everything here is pure and single-threaded; identical inputs give
//! bit-identical outputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

pub const PEAK_TOLERANCE: f64 = 1e-5;
pub const EXPONENT_RANGE: (f64, f64) = (0.1, 3.0);
pub const MIN_R_SQUARED: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    GEpsEps,
    GPhiPhi,
    FEpsPhi,
    Rho,
    MeanPhoton,
}

/// One curve per size over a shared ε grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub sizes: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub observable: Observable,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl CurveFamily {
    pub fn new(
        sizes: Vec<f64>,
        eps_grid: Vec<f64>,
        values: Vec<Vec<f64>>,
        observable: Observable,
    ) -> Result<Self> {
        if sizes.is_empty() || eps_grid.is_empty() {
            return Err(Error::InvalidFamily("empty sizes or grid".into()));
        }
        if !strictly_increasing(&sizes) || sizes.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidFamily("sizes must be positive and strictly increasing".into()));
        }
        if !strictly_increasing(&eps_grid) {
            return Err(Error::InvalidFamily("grid must be strictly increasing".into()));
        }
        if values.len() != sizes.len() || values.iter().any(|r| r.len() != eps_grid.len()) {
            return Err(Error::InvalidFamily("values must be one full row per size".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFamily("missing or non-finite values".into()));
        }
        Ok(Self { sizes, eps_grid, values, observable })
    }

    /// Rows whose `ε` lies in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Self> {
        let keep: Vec<usize> = (0..self.eps_grid.len())
            .filter(|&i| self.eps_grid[i] >= lo && self.eps_grid[i] <= hi)
            .collect();
        if keep.is_empty() {
            return Err(Error::Window(format!("no grid points in [{lo}, {hi}]")));
        }
        Self::new(
            self.sizes.clone(),
            keep.iter().map(|&i| self.eps_grid[i]).collect(),
            self.values.iter().map(|r| keep.iter().map(|&i| r[i]).collect()).collect(),
            self.observable,
        )
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|r| r.iter().map(|&v| f(v)).collect()).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub eps: f64,
    pub value: f64,
}

/// Maximum of `evaluate` on `[lo, hi]` by golden section to an interval of
/// `PEAK_TOLERANCE`, then one parabolic step through the final bracket.
pub fn locate_peak(mut evaluate: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<Peak> {
    if !(lo < hi) {
        return Err(Error::Bracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = evaluate(x1)?;
    let mut f2 = evaluate(x2)?;
    while b - a > PEAK_TOLERANCE {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = evaluate(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = evaluate(x2)?;
        }
    }
    if a == lo || b == hi {
        return Err(Error::Bracket { lo, hi });
    }
    let (x, fx) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let fa = evaluate(a)?;
    let fb = evaluate(b)?;
    if fx < fa || fx < fb {
        return Err(Error::Bracket { lo, hi });
    }
    let num = (x - a).powi(2) * (fx - fb) - (x - b).powi(2) * (fx - fa);
    let den = (x - a) * (fx - fb) - (x - b) * (fx - fa);
    if den != 0.0 {
        let v = x - 0.5 * num / den;
        if v > a && v < b {
            let fv = evaluate(v)?;
            if fv >= fx {
                return Ok(Peak { eps: v, value: fv });
            }
        }
    }
    Ok(Peak { eps: x, value: fx })
}

/// Least-squares fit of `y = c + a·s^(−b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedPowerFit {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub residual_norm: f64,
    pub b_at_boundary: bool,
}

fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|ti| (ti - tm).powi(2)).sum();
    let sty: f64 = t.iter().zip(y).map(|(ti, yi)| (ti - tm) * (yi - ym)).sum();
    let slope = sty / stt;
    let icpt = ym - slope * tm;
    let rss: f64 = t.iter().zip(y).map(|(ti, yi)| (yi - icpt - slope * ti).powi(2)).sum();
    (icpt, slope, rss.sqrt())
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 { x1 } else { x2 }
}

pub fn fit_shifted_power(sizes: &[f64], y: &[f64]) -> Result<ShiftedPowerFit> {
    if sizes.len() != y.len() || sizes.len() < 4 {
        return Err(Error::InvalidParams("need at least 4 (size, value) pairs".into()));
    }
    if sizes.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::NonPositive("sizes must be positive".into()));
    }
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let spread = y.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
        - y.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if spread <= 1e-14 * scale {
        return Err(Error::Unidentifiable("values are constant".into()));
    }
    let residual = |b: f64| -> f64 {
        let t: Vec<f64> = sizes.iter().map(|s| s.powf(-b)).collect();
        linear_fit(&t, y).2
    };
    let (lo, hi) = EXPONENT_RANGE;
    let steps: usize = 58;
    let h = (hi - lo) / steps as f64;
    let best = (0..=steps)
        .map(|i| (i, residual(lo + h * i as f64)))
        .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc })
        .0;
    let a = lo + h * best.saturating_sub(1) as f64;
    let b_hi = (lo + h * (best + 1) as f64).min(hi);
    let b = golden_min(residual, a, b_hi, 1e-12);
    let t: Vec<f64> = sizes.iter().map(|s| s.powf(-b)).collect();
    let (c, amp, rn) = linear_fit(&t, y);
    Ok(ShiftedPowerFit {
        c,
        a: amp,
        b,
        residual_norm: rn,
        b_at_boundary: b - lo < 1e-6 || hi - b < 1e-6,
    })
}

/// `ε_c(L) = ε_c* + a·L^(−b)`.
pub fn extrapolate_critical_point(sizes: &[f64], eps_c_of_l: &[f64]) -> Result<ShiftedPowerFit> {
    fit_shifted_power(sizes, eps_c_of_l)
}

/// Local log-log slopes between consecutive sizes, placed at the geometric
/// mean of each pair.
pub fn local_slopes(sizes: &[f64], values: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if sizes.len() != values.len() || sizes.len() < 2 {
        return Err(Error::InvalidParams("need matched sizes and values".into()));
    }
    if sizes.iter().chain(values).any(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive("local slopes need positive data".into()));
    }
    let mids = sizes.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    let slopes = sizes
        .windows(2)
        .zip(values.windows(2))
        .map(|(s, v)| (v[1] / v[0]).ln() / (s[1] / s[0]).ln())
        .collect();
    Ok((mids, slopes))
}

/// Fits `y(1/L) = a·(1/L)^b + c` to local values at effective sizes; `c`
/// is the `L → ∞` limit.
pub fn nu_convergence(sizes: &[f64], local: &[f64]) -> Result<ShiftedPowerFit> {
    fit_shifted_power(sizes, local)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub exponent_stderr: f64,
}

/// `y = A·x^p` by ordinary least squares on `(ln x, ln y)`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParams("need at least 2 matched points".into()));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (icpt, slope, rn) = linear_fit(&lx, &ly);
    let n = lx.len() as f64;
    let ym = ly.iter().sum::<f64>() / n;
    let sst: f64 = ly.iter().map(|v| (v - ym).powi(2)).sum();
    let xm = lx.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - xm).powi(2)).sum();
    let rss = rn * rn;
    let r_squared = if sst > 0.0 { 1.0 - rss / sst } else { 1.0 };
    let exponent_stderr = if lx.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(PowerLawFit { exponent: slope, prefactor: icpt.exp(), r_squared, exponent_stderr })
}

/// Spread of the rescaled family `(x, y) = ((ε − ε_c*)·L^(1/ν), value·L^(−Δ))`
/// about a master curve.
///
/// Each curve is compared with the piecewise-linear interpolant through the
/// pooled points of all other curves, over the abscissas they cover. The
/// result is the summed squared deviation divided by the number of compared
/// points.
pub fn collapse_objective(family: &CurveFamily, delta: f64, nu: f64, eps_c_star: f64) -> Result<f64> {
    let curves: Vec<Vec<(f64, f64)>> = family
        .sizes
        .iter()
        .zip(&family.values)
        .map(|(&l, row)| {
            let sx = l.powf(1.0 / nu);
            let sy = l.powf(-delta);
            family
                .eps_grid
                .iter()
                .zip(row)
                .map(|(&e, &v)| ((e - eps_c_star) * sx, v * sy))
                .collect()
        })
        .collect();
    if curves.len() < 2 {
        return Err(Error::Window("collapse needs at least two curves".into()));
    }

    let mut contributions = Vec::with_capacity(curves.len());
    let mut count = 0usize;
    for (i, curve) in curves.iter().enumerate() {
        let mut pool: Vec<(f64, f64)> = curves
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        pool.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        let (xmin, xmax) = (pool[0].0, pool[pool.len() - 1].0);
        let mut sum = 0.0;
        for &(x, y) in curve {
            if x < xmin || x > xmax {
                continue;
            }
            let k = pool.partition_point(|p| p.0 < x);
            let yi = if pool[k].0 == x {
                pool[k].1
            } else {
                let (x0, y0) = pool[k - 1];
                let (x1, y1) = pool[k];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            };
            sum += (y - yi).powi(2);
            count += 1;
        }
        contributions.push(sum);
    }
    if count == 0 {
        return Err(Error::Window("rescaled abscissas do not overlap".into()));
    }
    // Summation in sorted order keeps the result independent of curve order.
    contributions.sort_by(f64::total_cmp);
    Ok(contributions.iter().sum::<f64>() / count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub nu: f64,
    pub eps_c_star: f64,
    pub quality: f64,
    pub at_boundary: bool,
}

const COARSE_POINTS: usize = 7;
const NM_MAX_ITER: usize = 500;

/// Minimizes the collapse objective over `(ν, ε_c*)` at fixed `Δ`.
///
/// A `COARSE_POINTS²` grid over the ranges seeds a Nelder-Mead simplex whose
/// edges are half the grid spacing. No randomness is involved.
pub fn optimize_collapse(
    family: &CurveFamily,
    delta: f64,
    nu_range: (f64, f64),
    eps_range: (f64, f64),
) -> Result<CollapseFit> {
    if !(nu_range.0 < nu_range.1 && eps_range.0 < eps_range.1 && nu_range.0 > 0.0) {
        return Err(Error::InvalidParams("collapse ranges must be ordered with nu > 0".into()));
    }
    let objective = |p: [f64; 2]| -> f64 {
        if !(p[0] > 0.0) {
            return f64::INFINITY;
        }
        collapse_objective(family, delta, p[0], p[1]).unwrap_or(f64::INFINITY)
    };
    let grid = |r: (f64, f64), i: usize| r.0 + (r.1 - r.0) * i as f64 / (COARSE_POINTS - 1) as f64;
    let mut seed = ([grid(nu_range, 0), grid(eps_range, 0)], f64::INFINITY);
    for i in 0..COARSE_POINTS {
        for j in 0..COARSE_POINTS {
            let p = [grid(nu_range, i), grid(eps_range, j)];
            let f = objective(p);
            if f < seed.1 {
                seed = (p, f);
            }
        }
    }
    if !seed.1.is_finite() {
        return Err(Error::Window("no overlapping collapse over the seed grid".into()));
    }
    let step = [
        (nu_range.1 - nu_range.0) / (COARSE_POINTS - 1) as f64 / 2.0,
        (eps_range.1 - eps_range.0) / (COARSE_POINTS - 1) as f64 / 2.0,
    ];
    let (p, quality) = nelder_mead(objective, seed.0, step);
    let at_boundary =
        p[0] < nu_range.0 || p[0] > nu_range.1 || p[1] < eps_range.0 || p[1] > eps_range.1;
    Ok(CollapseFit { nu: p[0], eps_c_star: p[1], quality, at_boundary })
}

fn nelder_mead(f: impl Fn([f64; 2]) -> f64, x0: [f64; 2], step: [f64; 2]) -> ([f64; 2], f64) {
    let mut s: Vec<([f64; 2], f64)> = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]]
        .into_iter()
        .map(|p| (p, f(p)))
        .collect();
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..NM_MAX_ITER {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        let size = (1..3)
            .map(|k| ((s[k].0[0] - s[0].0[0]) / step[0]).abs().max(((s[k].0[1] - s[0].0[1]) / step[1]).abs()))
            .fold(0.0, f64::max);
        if size < 1e-9 || (s[2].1 - s[0].1).abs() <= 1e-15 * s[0].1.abs() && size < 1e-6 {
            break;
        }
        let centroid = lerp(s[0].0, s[1].0, 0.5);
        let reflected = lerp(centroid, s[2].0, -1.0);
        let fr = f(reflected);
        if fr < s[0].1 {
            let expanded = lerp(centroid, s[2].0, -2.0);
            let fe = f(expanded);
            s[2] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < s[1].1 {
            s[2] = (reflected, fr);
        } else {
            let contracted = if fr < s[2].1 {
                lerp(centroid, reflected, 0.5)
            } else {
                lerp(centroid, s[2].0, 0.5)
            };
            let fc = f(contracted);
            if fc < s[2].1.min(fr) {
                s[2] = (contracted, fc);
            } else {
                for k in 1..3 {
                    let p = lerp(s[0].0, s[k].0, 0.5);
                    s[k] = (p, f(p));
                }
            }
        }
    }
    s.sort_by(|a, b| a.1.total_cmp(&b.1));
    s[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationDimensions {
    pub delta_eps: f64,
    pub delta_phi: f64,
    /// `2 − Δ_ε − Δ_φ`.
    pub predicted_ep: f64,
    /// `|Δ_εφ − predicted_ep|`.
    pub consistency: f64,
}

pub fn perturbation_dimensions(delta_ee: f64, delta_pp: f64, delta_ep: f64) -> PerturbationDimensions {
    let delta_eps = (2.0 - delta_ee) / 2.0;
    let delta_phi = (2.0 - delta_pp) / 2.0;
    let predicted_ep = 2.0 - delta_eps - delta_phi;
    PerturbationDimensions {
        delta_eps,
        delta_phi,
        predicted_ep,
        consistency: (delta_ep - predicted_ep).abs(),
    }
}

/// Per-size data at the pseudo-critical points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakData {
    pub sizes: Vec<f64>,
    /// Location of the `g_εε` peak.
    pub eps_c: Vec<f64>,
    pub g_ee_peak: Vec<f64>,
    pub g_pp_at_peak: Vec<f64>,
    pub mean_photon_at_peak: Vec<f64>,
    /// Location and height of the `|F_εφ|` peak.
    pub f_peak_eps: Vec<f64>,
    pub f_peak: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingOptions {
    pub nu_range: (f64, f64),
    pub eps_range: (f64, f64),
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self { nu_range: (1.2, 1.8), eps_range: (0.98, 1.04) }
    }
}

/// Converged exponent from local slopes: the raw log-log fit, the local
/// slopes and their `L → ∞` extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergedExponent {
    pub raw: PowerLawFit,
    pub effective_sizes: Vec<f64>,
    pub local: Vec<f64>,
    pub limit: ShiftedPowerFit,
}

impl ConvergedExponent {
    /// Applies `transform` to each local slope before extrapolating.
    pub fn new(sizes: &[f64], values: &[f64], transform: impl Fn(f64) -> f64) -> Result<Self> {
        let raw = fit_power_law(sizes, values)?;
        let (effective_sizes, slopes) = local_slopes(sizes, values)?;
        let local: Vec<f64> = slopes.into_iter().map(transform).collect();
        let limit = nu_convergence(&effective_sizes, &local)?;
        Ok(Self { raw, effective_sizes, local, limit })
    }

    /// Distance between the extrapolated limit and the largest-size local value.
    pub fn drift(&self) -> f64 {
        (self.limit.c - self.local[self.local.len() - 1]).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingDiagnostics {
    pub degraded: bool,
    pub flags: Vec<String>,
    pub sizes: Vec<f64>,
    pub peaks: PeakData,
    pub extrapolation_residual_norm: f64,
    pub nu_fit: ConvergedExponent,
    pub delta_ee_fit: ConvergedExponent,
    pub delta_pp_fit: PowerLawFit,
    pub delta_ep_fit: PowerLawFit,
    pub nu_delta_product: f64,
    pub nu_delta_uncertainty: f64,
    pub predicted_delta_ep: f64,
    pub berry_consistency: f64,
    pub collapse_gee: CollapseFit,
    pub collapse_fep: CollapseFit,
    pub collapse_grid: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub eps_c_star: f64,
    pub fit_a: f64,
    pub fit_b: f64,
    pub nu: f64,
    pub delta_ee: f64,
    pub delta_pp: f64,
    pub delta_ep: f64,
    pub delta_eps: f64,
    pub delta_phi: f64,
    pub collapse_quality_gee: f64,
    pub collapse_quality_fep: f64,
    pub diagnostics: ScalingDiagnostics,
}

/// Assembles the scaling report from peak data and the `g_εε` and `|F_εφ|`
/// families.
///
/// `ν` is the extrapolated limit of `2/slope` of the peak `g_εε`, and
/// `Δ_εε` the extrapolated limit of the slope itself. `Δ_φφ` and `Δ_εφ`
/// are log-log fits of `g_φφ` at the `g_εε` peak and of the `|F_εφ|` peak.
pub fn scaling_report(
    peaks: &PeakData,
    g_family: &CurveFamily,
    f_family: &CurveFamily,
    options: &ScalingOptions,
) -> Result<ScalingReport> {
    let sizes = &peaks.sizes;
    let mut flags = Vec::new();

    let extrap = extrapolate_critical_point(sizes, &peaks.eps_c)?;
    if extrap.b_at_boundary {
        flags.push("critical-point exponent b at search boundary".to_string());
    }
    let nu_fit = ConvergedExponent::new(sizes, &peaks.g_ee_peak, |s| 2.0 / s)?;
    let delta_ee_fit = ConvergedExponent::new(sizes, &peaks.g_ee_peak, |s| s)?;
    for (name, fit) in [("nu", &nu_fit), ("delta_ee", &delta_ee_fit)] {
        if fit.limit.b_at_boundary {
            flags.push(format!("{name} convergence exponent at search boundary"));
        }
    }
    let delta_pp_fit = fit_power_law(sizes, &peaks.g_pp_at_peak)?;
    let delta_ep_fit = fit_power_law(sizes, &peaks.f_peak)?;
    for (name, fit) in [
        ("g_ee", &delta_ee_fit.raw),
        ("g_pp", &delta_pp_fit),
        ("f_ep", &delta_ep_fit),
    ] {
        if fit.r_squared < MIN_R_SQUARED {
            flags.push(format!("{name} power law r^2 = {} below {MIN_R_SQUARED}", fit.r_squared));
        }
    }

    let nu = nu_fit.limit.c;
    let delta_ee = delta_ee_fit.limit.c;
    let delta_pp = delta_pp_fit.exponent;
    let delta_ep = delta_ep_fit.exponent;
    let dims = perturbation_dimensions(delta_ee, delta_pp, delta_ep);

    let nu_delta_product = nu * delta_ee;
    let nu_delta_uncertainty = nu_delta_product
        * ((nu_fit.drift() / nu).powi(2) + (delta_ee_fit.drift() / delta_ee).powi(2)).sqrt();
    if (nu_delta_product - 2.0).abs() > nu_delta_uncertainty {
        flags.push(format!(
            "nu * delta_ee = {nu_delta_product} differs from 2 by more than {nu_delta_uncertainty}"
        ));
    }

    let collapse_quality_gee = collapse_objective(g_family, delta_ee, nu, extrap.c)?;
    let collapse_fep_opt = optimize_collapse(f_family, delta_ep, options.nu_range, options.eps_range)?;
    let collapse_gee_opt = optimize_collapse(g_family, delta_ee, options.nu_range, options.eps_range)?;
    for (name, fit) in [("g_ee", &collapse_gee_opt), ("f_ep", &collapse_fep_opt)] {
        if fit.at_boundary {
            flags.push(format!("{name} collapse optimum left the search range"));
        }
    }

    let grid = &g_family.eps_grid;
    Ok(ScalingReport {
        eps_c_star: extrap.c,
        fit_a: extrap.a,
        fit_b: extrap.b,
        nu,
        delta_ee,
        delta_pp,
        delta_ep,
        delta_eps: dims.delta_eps,
        delta_phi: dims.delta_phi,
        collapse_quality_gee,
        collapse_quality_fep: collapse_fep_opt.quality,
        diagnostics: ScalingDiagnostics {
            degraded: !flags.is_empty(),
            flags,
            sizes: sizes.clone(),
            peaks: peaks.clone(),
            extrapolation_residual_norm: extrap.residual_norm,
            nu_fit,
            delta_ee_fit,
            delta_pp_fit,
            delta_ep_fit,
            nu_delta_product,
            nu_delta_uncertainty,
            predicted_delta_ep: dims.predicted_ep,
            berry_consistency: dims.consistency,
            collapse_gee: collapse_gee_opt,
            collapse_fep: collapse_fep_opt,
            collapse_grid: (grid[0], grid[grid.len() - 1]),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K0Diagnostics {
    pub degraded: bool,
    pub flags: Vec<String>,
    pub ncut_list: Vec<f64>,
    pub g_ee: Vec<f64>,
    pub f_ep: Vec<f64>,
    pub mean_photon: Vec<f64>,
    pub gamma1_fit: PowerLawFit,
    pub gamma2_fit: PowerLawFit,
    pub alpha_fit: PowerLawFit,
    pub sizes: Vec<f64>,
    pub mean_photon_at_peak: Vec<f64>,
    pub delta_nbar_fit: ConvergedExponent,
    pub delta_ee: f64,
    pub delta_ep: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K0Report {
    pub gamma1: f64,
    pub gamma2: f64,
    pub alpha_exp: f64,
    pub delta_nbar: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta1_prime: f64,
    pub beta2_prime: f64,
    pub diagnostics: K0Diagnostics,
}

/// Inputs for the `K = 0` cutoff scaling and its photon-number relations.
#[derive(Debug, Clone, PartialEq)]
pub struct K0Inputs {
    pub ncut_list: Vec<f64>,
    pub g_ee: Vec<f64>,
    pub f_ep: Vec<f64>,
    pub mean_photon: Vec<f64>,
    /// Sizes and `N̄` at the `g_εε` peak of the `K > 0` study.
    pub sizes: Vec<f64>,
    pub mean_photon_at_peak: Vec<f64>,
    pub delta_ee: f64,
    pub delta_ep: f64,
}

/// `Δ_N̄` is the extrapolated limit of the local `N̄` slopes in `L`.
pub fn k0_report(inputs: &K0Inputs) -> Result<K0Report> {
    let f_abs: Vec<f64> = inputs.f_ep.iter().map(|v| v.abs()).collect();
    let gamma1_fit = fit_power_law(&inputs.ncut_list, &inputs.g_ee)?;
    let gamma2_fit = fit_power_law(&inputs.ncut_list, &f_abs)?;
    let alpha_fit = fit_power_law(&inputs.ncut_list, &inputs.mean_photon)?;
    let delta_nbar_fit = ConvergedExponent::new(&inputs.sizes, &inputs.mean_photon_at_peak, |s| s)?;

    let mut flags = Vec::new();
    for (name, fit) in [
        ("gamma1", &gamma1_fit),
        ("gamma2", &gamma2_fit),
        ("alpha", &alpha_fit),
        ("delta_nbar", &delta_nbar_fit.raw),
    ] {
        if fit.r_squared < MIN_R_SQUARED {
            flags.push(format!("{name} power law r^2 = {} below {MIN_R_SQUARED}", fit.r_squared));
        }
    }
    if delta_nbar_fit.limit.b_at_boundary {
        flags.push("delta_nbar convergence exponent at search boundary".to_string());
    }

    let gamma1 = gamma1_fit.exponent;
    let gamma2 = gamma2_fit.exponent;
    let alpha_exp = alpha_fit.exponent;
    let delta_nbar = delta_nbar_fit.limit.c;
    Ok(K0Report {
        gamma1,
        gamma2,
        alpha_exp,
        delta_nbar,
        beta1: alpha_exp * gamma1,
        beta2: alpha_exp * gamma2,
        beta1_prime: inputs.delta_ee / delta_nbar,
        beta2_prime: inputs.delta_ep / delta_nbar,
        diagnostics: K0Diagnostics {
            degraded: !flags.is_empty(),
            flags,
            ncut_list: inputs.ncut_list.clone(),
            g_ee: inputs.g_ee.clone(),
            f_ep: inputs.f_ep.clone(),
            mean_photon: inputs.mean_photon.clone(),
            gamma1_fit,
            gamma2_fit,
            alpha_fit,
            sizes: inputs.sizes.clone(),
            mean_photon_at_peak: inputs.mean_photon_at_peak.clone(),
            delta_nbar_fit,
            delta_ee: inputs.delta_ee,
            delta_ep: inputs.delta_ep,
        },
    })
}
