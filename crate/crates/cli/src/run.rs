use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use kerr_qgt_core::eigen::{ground_state, Warning};
use kerr_qgt_core::model::{mean_photon, ModelParams};
use kerr_qgt_core::pipeline::{k0_study, scaling_study, ScalingConfig, ScalingStudy};
use kerr_qgt_core::qgt::{qgt_finite_difference, qgt_spectral, QgtResult, DEFAULT_STEP_EPS, DEFAULT_STEP_PHI};
use kerr_qgt_core::scaling::{collapse_objective, ScalingOptions};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{MethodSelection, Mode, SweepConfig};
use crate::manifest::{manifest_path, OutputHash, PointNote, RunManifest};
use crate::output::{fmt_f64, sha256_hex, to_json, write_atomic, Table};

pub const PHASE_DIAGRAM_CSV: &str = "phase_diagram.csv";
pub const QGT_CSV: &str = "qgt.csv";
pub const SCALING_REPORT: &str = "scaling_report.json";
pub const SCALING_PEAKS_CSV: &str = "scaling_peaks.csv";
pub const SCALING_CURVES_CSV: &str = "scaling_curves.csv";
pub const COLLAPSE_CSV: &str = "collapse.csv";
pub const COLLAPSE_REPORT: &str = "collapse_report.json";
pub const K0_REPORT: &str = "k0_report.json";
pub const K0_POINTS_CSV: &str = "k0_points.csv";
pub const K0_PHOTON_CSV: &str = "k0_photon.csv";

pub const PHASE_DIAGRAM_COLUMNS: &[&str] = &["eps", "phi", "L", "ncut", "mean_n", "rho", "warn"];
pub const QGT_COLUMNS: &[&str] =
    &["L", "eps", "phi", "ncut", "method", "g_ee", "g_pp", "g_ep", "f_ep", "gap", "mean_n", "warn"];
pub const SCALING_PEAKS_COLUMNS: &[&str] =
    &["L", "eps_c", "g_ee_peak", "g_pp_at_peak", "mean_n_at_peak", "f_peak_eps", "f_peak"];
pub const SCALING_CURVES_COLUMNS: &[&str] = &["L", "eps", "g_ee", "abs_f_ep"];
pub const COLLAPSE_COLUMNS: &[&str] = &["observable", "L", "eps", "x", "y"];
pub const K0_POINTS_COLUMNS: &[&str] = &["ncut", "g_ee", "f_ep", "mean_n", "warn"];
pub const K0_PHOTON_COLUMNS: &[&str] = &["L", "eps_c", "mean_n"];

/// Files produced by one run, in write order, plus per-point notes.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub notes: Vec<PointNote>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Completed(RunManifest),
    UpToDate(RunManifest),
}

fn warn_label(warnings: &[Warning]) -> String {
    warnings
        .iter()
        .map(|w| match w {
            Warning::CutoffInadequate { .. } => "cutoff_inadequate",
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn warn_message(w: &Warning) -> String {
    match w {
        Warning::CutoffInadequate { tail_weight } => {
            format!("cutoff inadequate: tail weight {}", fmt_f64(*tail_weight))
        }
    }
}

fn notes_for(point: String, warnings: &[Warning]) -> impl Iterator<Item = PointNote> + '_ {
    warnings.iter().map(move |w| PointNote { point: point.clone(), message: warn_message(w) })
}

fn error_label(e: &kerr_qgt_core::Error) -> String {
    format!("error: {e}").replace([',', '\n'], ";")
}

/// Minimum cutoff for a phase-diagram run at size `L` up to `eps_max`.
pub fn required_cutoff(size: f64, eps_max: f64) -> f64 {
    size * (eps_max - 1.0).max(0.0) / 2.0 * 1.3 + 50.0
}

/// Checks that can fail before any output is touched.
pub fn precheck(config: &SweepConfig) -> Result<()> {
    config.validate()?;
    if config.mode == Mode::PhaseDiagram {
        let need = required_cutoff(config.size, config.eps.max);
        if (config.ncut as f64) < need {
            bail!(
                "cutoff check failed at grid corners (eps={}, phi={}) and (eps={}, phi={}): L={} needs ncut >= {}, got {}",
                config.eps.max,
                config.phi.min,
                config.eps.max,
                config.phi.max,
                config.size,
                need.ceil(),
                config.ncut
            );
        }
    }
    Ok(())
}

pub fn phase_diagram(config: &SweepConfig) -> Result<Artifacts> {
    precheck(config)?;
    let eps = config.eps.points();
    let phi = config.phi.points();
    let tasks: Vec<(f64, f64)> = eps.iter().flat_map(|&e| phi.iter().map(move |&p| (e, p))).collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|&(e, p)| -> kerr_qgt_core::Result<_> {
            let gs = ground_state(&ModelParams::with_size(config.size, e, p, config.ncut)?)?;
            Ok((mean_photon(&gs.fock_vector)?, gs.warnings))
        })
        .collect();

    let mut table = Table::new(PHASE_DIAGRAM_COLUMNS)?;
    let mut art = Artifacts::default();
    for (&(e, p), r) in tasks.iter().zip(results) {
        let (n, warn) = match r {
            Ok((n, w)) => {
                art.notes.extend(notes_for(format!("eps={} phi={}", fmt_f64(e), fmt_f64(p)), &w));
                (n, warn_label(&w))
            }
            Err(err) => {
                art.notes.push(PointNote { point: format!("eps={} phi={}", fmt_f64(e), fmt_f64(p)), message: err.to_string() });
                (f64::NAN, error_label(&err))
            }
        };
        table.row([
            fmt_f64(e),
            fmt_f64(p),
            fmt_f64(config.size),
            config.ncut.to_string(),
            fmt_f64(n),
            fmt_f64(n / config.size),
            warn,
        ])?;
    }
    art.files.push((PHASE_DIAGRAM_CSV.to_string(), table.into_bytes()?));
    Ok(art)
}

fn qgt_point(params: &ModelParams, method: MethodSelection) -> kerr_qgt_core::Result<QgtResult> {
    match method {
        MethodSelection::Fd => qgt_finite_difference(params, DEFAULT_STEP_EPS, DEFAULT_STEP_PHI),
        _ => qgt_spectral(params),
    }
}

/// One row per `(L, ε, φ, method)` in lexicographic grid order; `both`
/// writes a spectral row followed by an `fd` row.
pub fn qgt_sweep(config: &SweepConfig) -> Result<Artifacts> {
    let methods: &[MethodSelection] = match config.method {
        MethodSelection::Both => &[MethodSelection::Spectral, MethodSelection::Fd],
        MethodSelection::Spectral => &[MethodSelection::Spectral],
        MethodSelection::Fd => &[MethodSelection::Fd],
    };
    let eps = config.eps.points();
    let phi = config.phi.points();
    let mut tasks = Vec::new();
    for &l in &config.sizes {
        for &e in &eps {
            for &p in &phi {
                for &m in methods {
                    tasks.push((l, e, p, m));
                }
            }
        }
    }
    let results: Vec<_> = tasks
        .par_iter()
        .map(|&(l, e, p, m)| ModelParams::with_size(l, e, p, config.ncut).and_then(|params| qgt_point(&params, m)))
        .collect();

    let mut table = Table::new(QGT_COLUMNS)?;
    let mut art = Artifacts::default();
    for (&(l, e, p, m), r) in tasks.iter().zip(results) {
        let method = match m {
            MethodSelection::Fd => "fd",
            _ => "spectral",
        };
        let point = format!("L={} eps={} phi={} method={method}", fmt_f64(l), fmt_f64(e), fmt_f64(p));
        let (vals, warn) = match r {
            Ok(q) => {
                art.notes.extend(notes_for(point, &q.warnings));
                ([q.g_ee(), q.g_pp(), q.g_ep(), q.f_ep(), q.gap, q.mean_photon], warn_label(&q.warnings))
            }
            Err(err) => {
                art.notes.push(PointNote { point, message: err.to_string() });
                ([f64::NAN; 6], error_label(&err))
            }
        };
        let mut row = vec![fmt_f64(l), fmt_f64(e), fmt_f64(p), config.ncut.to_string(), method.to_string()];
        row.extend(vals.iter().map(|&v| fmt_f64(v)));
        row.push(warn);
        table.row(row)?;
    }
    art.files.push((QGT_CSV.to_string(), table.into_bytes()?));
    Ok(art)
}

pub fn scaling_config(config: &SweepConfig) -> Result<ScalingConfig> {
    ensure!(config.phi.steps == 1, "scaling studies use a single phi");
    Ok(ScalingConfig {
        sizes: config.sizes.clone(),
        n_cut: config.ncut,
        eps_min: config.eps.min,
        eps_max: config.eps.max,
        eps_steps: config.eps.steps,
        phi: config.phi.min,
        options: ScalingOptions::default(),
    })
}

fn study_notes(study: &ScalingStudy) -> Vec<PointNote> {
    study
        .warnings
        .iter()
        .map(|w| PointNote {
            point: format!("L={} eps={}", fmt_f64(w.size), fmt_f64(w.eps)),
            message: warn_message(&w.warning),
        })
        .collect()
}

fn peaks_table(study: &ScalingStudy) -> Result<Vec<u8>> {
    let p = &study.peaks;
    let mut t = Table::new(SCALING_PEAKS_COLUMNS)?;
    for i in 0..p.sizes.len() {
        t.row(
            [p.sizes[i], p.eps_c[i], p.g_ee_peak[i], p.g_pp_at_peak[i], p.mean_photon_at_peak[i], p.f_peak_eps[i], p.f_peak[i]]
                .map(fmt_f64),
        )?;
    }
    t.into_bytes()
}

fn curves_table(study: &ScalingStudy) -> Result<Vec<u8>> {
    let mut t = Table::new(SCALING_CURVES_COLUMNS)?;
    let g = &study.g_family;
    for (s, &l) in g.sizes.iter().enumerate() {
        for (k, &e) in g.eps_grid.iter().enumerate() {
            t.row([l, e, g.values[s][k], study.f_family.values[s][k]].map(fmt_f64))?;
        }
    }
    t.into_bytes()
}

/// Rescaled curves `x = (ε − ε_c*)·L^(1/ν)`, `y = value·L^(−Δ)`: `g_ee` at
/// the reported `(ν, ε_c*, Δ_εε)`, `f_ep` at its own collapse optimum.
fn collapse_table(study: &ScalingStudy) -> Result<Vec<u8>> {
    let r = &study.report;
    let fc = &r.diagnostics.collapse_fep;
    let mut t = Table::new(COLLAPSE_COLUMNS)?;
    for (name, fam, nu, ec, delta) in [
        ("g_ee", &study.g_family, r.nu, r.eps_c_star, r.delta_ee),
        ("f_ep", &study.f_family, fc.nu, fc.eps_c_star, r.delta_ep),
    ] {
        for (s, &l) in fam.sizes.iter().enumerate() {
            for (k, &e) in fam.eps_grid.iter().enumerate() {
                let x = (e - ec) * l.powf(1.0 / nu);
                let y = fam.values[s][k] * l.powf(-delta);
                t.row([name.to_string(), fmt_f64(l), fmt_f64(e), fmt_f64(x), fmt_f64(y)])?;
            }
        }
    }
    t.into_bytes()
}

pub fn scaling(config: &SweepConfig) -> Result<Artifacts> {
    let study = scaling_study(&scaling_config(config)?)?;
    Ok(Artifacts {
        files: vec![
            (SCALING_REPORT.to_string(), to_json(&study.report)?),
            (SCALING_PEAKS_CSV.to_string(), peaks_table(&study)?),
            (SCALING_CURVES_CSV.to_string(), curves_table(&study)?),
            (COLLAPSE_CSV.to_string(), collapse_table(&study)?),
        ],
        notes: study_notes(&study),
    })
}

#[derive(Debug, Serialize)]
struct NuScanPoint {
    nu: f64,
    quality_gee: f64,
}

#[derive(Debug, Serialize)]
struct CollapseReport {
    eps_c_star: f64,
    delta_ee: f64,
    delta_ep: f64,
    nu_scan: Vec<NuScanPoint>,
    optimum_gee: kerr_qgt_core::scaling::CollapseFit,
    optimum_fep: kerr_qgt_core::scaling::CollapseFit,
}

pub const COLLAPSE_NU_SCAN: [f64; 7] = [1.2, 1.3, 1.4, 1.51, 1.6, 1.7, 1.8];

pub fn collapse(config: &SweepConfig) -> Result<Artifacts> {
    let study = scaling_study(&scaling_config(config)?)?;
    let r = &study.report;
    let nu_scan = COLLAPSE_NU_SCAN
        .iter()
        .map(|&nu| {
            Ok(NuScanPoint { nu, quality_gee: collapse_objective(&study.g_family, r.delta_ee, nu, r.eps_c_star)? })
        })
        .collect::<kerr_qgt_core::Result<_>>()?;
    let report = CollapseReport {
        eps_c_star: r.eps_c_star,
        delta_ee: r.delta_ee,
        delta_ep: r.delta_ep,
        nu_scan,
        optimum_gee: r.diagnostics.collapse_gee,
        optimum_fep: r.diagnostics.collapse_fep,
    };
    Ok(Artifacts {
        files: vec![
            (COLLAPSE_REPORT.to_string(), to_json(&report)?),
            (COLLAPSE_CSV.to_string(), collapse_table(&study)?),
        ],
        notes: study_notes(&study),
    })
}

pub fn k0(config: &SweepConfig) -> Result<Artifacts> {
    let study = scaling_study(&scaling_config(config)?)?;
    let k = k0_study(&config.ncut_list, &study)?;
    let d = &k.report.diagnostics;
    let mut points = Table::new(K0_POINTS_COLUMNS)?;
    for (i, &n) in config.ncut_list.iter().enumerate() {
        let w: Vec<Warning> = k.warnings.iter().filter(|(c, _)| *c == n).map(|(_, w)| *w).collect();
        points.row([
            n.to_string(),
            fmt_f64(d.g_ee[i]),
            fmt_f64(d.f_ep[i]),
            fmt_f64(d.mean_photon[i]),
            warn_label(&w),
        ])?;
    }
    let mut photon = Table::new(K0_PHOTON_COLUMNS)?;
    for (i, &l) in study.peaks.sizes.iter().enumerate() {
        photon.row([l, study.peaks.eps_c[i], study.peaks.mean_photon_at_peak[i]].map(fmt_f64))?;
    }
    let mut notes = study_notes(&study);
    notes.extend(k.warnings.iter().map(|(n, w)| PointNote {
        point: format!("K=0 ncut={n} eps=1"),
        message: warn_message(w),
    }));
    Ok(Artifacts {
        files: vec![
            (K0_REPORT.to_string(), to_json(&k.report)?),
            (K0_POINTS_CSV.to_string(), points.into_bytes()?),
            (K0_PHOTON_CSV.to_string(), photon.into_bytes()?),
        ],
        notes,
    })
}

pub fn generate(config: &SweepConfig) -> Result<Artifacts> {
    match config.mode {
        Mode::PhaseDiagram => phase_diagram(config),
        Mode::Qgt => qgt_sweep(config),
        Mode::Scaling => scaling(config),
        Mode::Collapse => collapse(config),
        Mode::K0 => k0(config),
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Runs `config` into `config.out` on a pool of `config.threads` workers.
///
/// The previous manifest is removed before any output is touched and the new
/// one is written last. An existing manifest with the same config and intact
/// outputs makes this a no-op unless `force` is set.
pub fn execute(config: &SweepConfig, force: bool) -> Result<Outcome> {
    precheck(config)?;
    let out = config.out.as_path();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mpath = manifest_path(out, config.mode);
    if !force && mpath.exists() {
        if let Ok(m) = RunManifest::load(&mpath) {
            if m.config == *config && m.outputs_intact(out) {
                return Ok(Outcome::UpToDate(m));
            }
        }
    }
    if mpath.exists() {
        fs::remove_file(&mpath).with_context(|| format!("removing stale {}", mpath.display()))?;
    }

    let started = timestamp();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build()?;
    let art = pool.install(|| generate(config))?;
    let outputs = write_outputs(out, &art)?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        mode: config.mode,
        config: config.clone(),
        started,
        finished: timestamp(),
        warnings: art.notes,
        outputs,
    };
    write_atomic(&mpath, &to_json(&manifest)?)?;
    Ok(Outcome::Completed(manifest))
}

fn write_outputs(out: &Path, art: &Artifacts) -> Result<Vec<OutputHash>> {
    art.files
        .iter()
        .map(|(name, bytes)| {
            write_atomic(&out.join(name), bytes)?;
            Ok(OutputHash { file: name.clone(), sha256: sha256_hex(bytes) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_rule() {
        assert_eq!(required_cutoff(100.0, 0.9), 50.0);
        assert!((required_cutoff(2000.0, 1.3) - 440.0).abs() < 1e-9);
    }

    #[test]
    fn warn_labels_join() {
        let w = [Warning::CutoffInadequate { tail_weight: 1e-9 }; 2];
        assert_eq!(warn_label(&w), "cutoff_inadequate;cutoff_inadequate");
        assert_eq!(warn_label(&[]), "");
    }
}
