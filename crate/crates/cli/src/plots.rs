//! Self-contained matplotlib scripts that read only the emitted CSVs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::manifest::RunManifest;
use crate::output::write_atomic;
use crate::run::{
    COLLAPSE_CSV, K0_PHOTON_CSV, K0_POINTS_CSV, PHASE_DIAGRAM_CSV, QGT_CSV, SCALING_CURVES_CSV,
    SCALING_PEAKS_CSV,
};

pub const PLOTS_DIR: &str = "plots";

struct Figure {
    script: &'static str,
    inputs: &'static [(&'static str, &'static [&'static str])],
    body: &'static str,
}

const PRELUDE: &str = r#"import csv
import math
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.dirname(HERE)


def read(name):
    with open(os.path.join(OUT, name), newline="") as fh:
        return list(csv.DictReader(fh))


def by(rows, key):
    groups = defaultdict(list)
    for r in rows:
        groups[r[key]].append(r)
    return sorted(groups.items(), key=lambda kv: float(kv[0]))


def col(rows, key):
    return [float(r[key]) for r in rows]


def save(fig, name):
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, name), dpi=150)

"#;

const FIGURES: &[Figure] = &[
    Figure {
        script: "phase_diagram.py",
        inputs: &[(PHASE_DIAGRAM_CSV, &["eps", "phi", "rho"])],
        body: r#"rows = read("phase_diagram.csv")
eps = sorted({float(r["eps"]) for r in rows})
phi = sorted({float(r["phi"]) for r in rows})
grid = [[math.nan] * len(eps) for _ in phi]
for r in rows:
    grid[phi.index(float(r["phi"]))][eps.index(float(r["eps"]))] = float(r["rho"])
fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
m = a.pcolormesh(eps, phi, grid, shading="nearest")
fig.colorbar(m, ax=a, label="rho")
a.set_xlabel("eps")
a.set_ylabel("phi")
for j in range(0, len(phi), max(1, len(phi) // 4)):
    b.plot(eps, grid[j], label="phi=%.3f" % phi[j])
b.set_xlabel("eps")
b.set_ylabel("rho")
b.legend()
save(fig, "phase_diagram.png")
"#,
    },
    Figure {
        script: "qgt_scan.py",
        inputs: &[(QGT_CSV, &["L", "eps", "method", "g_ee", "f_ep"])],
        body: r#"rows = [r for r in read("qgt.csv") if r["method"] == "spectral"]
fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
for size, rs in by(rows, "L"):
    L = float(size)
    a.plot(col(rs, "eps"), [g / L for g in col(rs, "g_ee")], label="L=%g" % L)
    b.plot(col(rs, "eps"), col(rs, "f_ep"), label="L=%g" % L)
a.set_xlabel("eps")
a.set_ylabel("g_ee / L")
b.set_xlabel("eps")
b.set_ylabel("F_ep")
a.legend()
save(fig, "qgt_scan.png")
"#,
    },
    Figure {
        script: "peak_collapse.py",
        inputs: &[
            (SCALING_CURVES_CSV, &["L", "eps", "g_ee"]),
            (COLLAPSE_CSV, &["observable", "L", "x", "y"]),
        ],
        body: r#"curves = read("scaling_curves.csv")
coll = [r for r in read("collapse.csv") if r["observable"] == "g_ee"]
fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
for size, rs in by(curves, "L"):
    a.plot(col(rs, "eps"), col(rs, "g_ee"), label="L=%g" % float(size))
for size, rs in by(coll, "L"):
    b.plot(col(rs, "x"), col(rs, "y"), ".", ms=3, label="L=%g" % float(size))
a.set_xlabel("eps")
a.set_ylabel("g_ee")
b.set_xlabel("(eps - eps_c*) L^(1/nu)")
b.set_ylabel("g_ee L^(-Delta_ee)")
a.legend()
save(fig, "peak_collapse.png")
"#,
    },
    Figure {
        script: "exponent_fits.py",
        inputs: &[(SCALING_PEAKS_CSV, &["L", "g_ee_peak", "g_pp_at_peak", "f_peak"])],
        body: r#"rows = read("scaling_peaks.csv")
lnL = [math.log(v) for v in col(rows, "L")]
fig, axes = plt.subplots(1, 3, figsize=(13, 4))
for ax, key in zip(axes, ["g_ee_peak", "g_pp_at_peak", "f_peak"]):
    lny = [math.log(v) for v in col(rows, key)]
    n = len(lnL)
    mx, my = sum(lnL) / n, sum(lny) / n
    slope = sum((x - mx) * (y - my) for x, y in zip(lnL, lny)) / sum((x - mx) ** 2 for x in lnL)
    ax.plot(lnL, lny, "o")
    ax.plot(lnL, [my + slope * (x - mx) for x in lnL], "-", label="slope %.4f" % slope)
    ax.set_xlabel("ln(L)")
    ax.set_ylabel("ln(%s)" % key)
    ax.legend()
save(fig, "exponent_fits.png")
"#,
    },
    Figure {
        script: "curvature.py",
        inputs: &[
            (SCALING_CURVES_CSV, &["L", "eps", "abs_f_ep"]),
            (COLLAPSE_CSV, &["observable", "L", "x", "y"]),
        ],
        body: r#"curves = read("scaling_curves.csv")
coll = [r for r in read("collapse.csv") if r["observable"] == "f_ep"]
fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
for size, rs in by(curves, "L"):
    a.plot(col(rs, "eps"), col(rs, "abs_f_ep"), label="L=%g" % float(size))
for size, rs in by(coll, "L"):
    b.plot(col(rs, "x"), col(rs, "y"), ".", ms=3, label="L=%g" % float(size))
a.set_xlabel("eps")
a.set_ylabel("|F_ep|")
b.set_xlabel("(eps - eps_c) L^(1/nu')")
b.set_ylabel("|F_ep| L^(-Delta_ep)")
a.legend()
save(fig, "curvature.png")
"#,
    },
    Figure {
        script: "k0_scaling.py",
        inputs: &[
            (K0_POINTS_CSV, &["ncut", "g_ee", "f_ep", "mean_n"]),
            (K0_PHOTON_CSV, &["L", "mean_n"]),
        ],
        body: r#"pts = read("k0_points.csv")
ph = read("k0_photon.csv")
lnN = [math.log(v) for v in col(pts, "ncut")]
fig, axes = plt.subplots(1, 4, figsize=(16, 4))
for ax, key in zip(axes, ["g_ee", "f_ep", "mean_n"]):
    ax.plot(lnN, [math.log(abs(v)) for v in col(pts, key)], "o-")
    ax.set_xlabel("ln(N_cut)")
    ax.set_ylabel("ln(%s)" % key)
axes[3].plot([math.log(v) for v in col(ph, "L")], [math.log(v) for v in col(ph, "mean_n")], "o-")
axes[3].set_xlabel("ln(L)")
axes[3].set_ylabel("ln(mean_n at eps_c(L))")
save(fig, "k0_scaling.png")
"#,
    },
];

fn check_columns(path: &Path, file: &str, required: &[&str]) -> Result<()> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = reader.headers().with_context(|| format!("reading header of {file}"))?;
    for c in required {
        if !header.iter().any(|h| h == *c) {
            bail!("schema error: {file} is missing column `{c}`");
        }
    }
    Ok(())
}

/// Writes one script per figure whose inputs are all listed in a completed
/// run manifest under `out`. Returns the script paths.
pub fn emit_plots(out: &Path) -> Result<Vec<PathBuf>> {
    let manifests = RunManifest::load_all(out)?;
    let listed: Vec<&str> = manifests.iter().flat_map(|m| m.outputs.iter().map(|o| o.file.as_str())).collect();
    let dir = out.join(PLOTS_DIR);
    let mut written = Vec::new();
    for fig in FIGURES {
        if !fig.inputs.iter().all(|(f, _)| listed.contains(f)) {
            continue;
        }
        for (file, cols) in fig.inputs {
            check_columns(&out.join(file), file, cols)?;
        }
        std::fs::create_dir_all(&dir)?;
        let path = dir.join(fig.script);
        write_atomic(&path, format!("{PRELUDE}\n{}", fig.body).as_bytes())?;
        written.push(path);
    }
    if written.is_empty() {
        bail!("no completed run outputs in {} to plot", out.display());
    }
    Ok(written)
}

/// CSV files a script reads.
pub fn referenced_files(script: &str) -> Vec<String> {
    script
        .split("read(\"")
        .skip(1)
        .filter_map(|s| s.split('"').next())
        .filter(|s| s.ends_with(".csv"))
        .map(str::to_string)
        .collect()
}
