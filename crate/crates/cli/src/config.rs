use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use clap::ValueEnum;
use kerr_qgt_core::pipeline::linspace;
use serde::{Deserialize, Serialize};

/// Inclusive grid `min:max:steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn single(v: f64) -> Self {
        Self::new(v, v, 1)
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }

    fn validate(&self, name: &str) -> Result<()> {
        ensure!(self.steps >= 1, "{name} grid is empty");
        ensure!(self.min.is_finite() && self.max.is_finite(), "{name} grid bounds must be finite");
        ensure!(self.min <= self.max, "{name} grid range is reversed: {} > {}", self.min, self.max);
        ensure!(self.steps == 1 || self.min < self.max, "{name} grid has zero width with {} steps", self.steps);
        Ok(())
    }
}

impl FromStr for GridRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("expected min:max:steps, got {s:?}");
        }
        Ok(Self::new(
            parts[0].trim().parse().with_context(|| format!("bad min in {s:?}"))?,
            parts[1].trim().parse().with_context(|| format!("bad max in {s:?}"))?,
            parts[2].trim().parse().with_context(|| format!("bad steps in {s:?}"))?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PhaseDiagram,
    Qgt,
    Scaling,
    Collapse,
    K0,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::PhaseDiagram => "phase-diagram",
            Mode::Qgt => "qgt",
            Mode::Scaling => "scaling",
            Mode::Collapse => "collapse",
            Mode::K0 => "k0",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodSelection {
    Spectral,
    Fd,
    Both,
}

/// Fully resolved run configuration; echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub mode: Mode,
    /// `L` for the phase diagram.
    pub size: f64,
    /// `L` list for the QGT, scaling, collapse and `K > 0` part of the k0 study.
    pub sizes: Vec<f64>,
    pub eps: GridRange,
    pub phi: GridRange,
    pub ncut: usize,
    pub ncut_list: Vec<usize>,
    pub method: MethodSelection,
    pub threads: usize,
    pub out: PathBuf,
}

const DEFAULT_SIZES: [f64; 5] = [300.0, 400.0, 500.0, 600.0, 700.0];

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl SweepConfig {
    pub fn defaults(mode: Mode) -> Self {
        let base = Self {
            mode,
            size: 100.0,
            sizes: DEFAULT_SIZES.to_vec(),
            eps: GridRange::new(0.9, 1.3, 201),
            phi: GridRange::single(0.0),
            ncut: 800,
            ncut_list: vec![200, 400, 800, 1600, 3200],
            method: MethodSelection::Spectral,
            threads: default_threads(),
            out: PathBuf::from("out"),
        };
        match mode {
            Mode::PhaseDiagram => Self {
                eps: GridRange::new(0.0, 1.5, 61),
                // [0, 2π) in 16 steps.
                phi: GridRange::new(0.0, 2.0 * PI * 15.0 / 16.0, 16),
                ncut: 200,
                ..base
            },
            _ => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.threads >= 1, "threads must be at least 1");
        self.eps.validate("eps")?;
        self.phi.validate("phi")?;
        ensure!(self.ncut >= 2, "ncut must be at least 2");
        match self.mode {
            Mode::PhaseDiagram => {
                ensure!(self.size > 0.0 && self.size.is_finite(), "L must be positive");
            }
            Mode::Qgt => ensure!(!self.sizes.is_empty(), "L list is empty"),
            Mode::Scaling | Mode::Collapse => {
                ensure!(self.sizes.len() >= 4, "scaling needs at least 4 sizes");
            }
            Mode::K0 => {
                ensure!(self.sizes.len() >= 4, "k0 needs at least 4 sizes");
                ensure!(self.ncut_list.len() >= 5, "k0 needs at least 5 cutoffs");
            }
        }
        if matches!(self.mode, Mode::Qgt | Mode::Scaling | Mode::Collapse | Mode::K0) {
            ensure!(self.sizes.iter().all(|&l| l > 0.0), "sizes must be positive");
            ensure!(
                self.sizes.windows(2).all(|w| w[0] < w[1]),
                "L list must be strictly increasing"
            );
        }
        ensure!(
            self.ncut_list.windows(2).all(|w| w[0] < w[1]),
            "ncut list must be strictly increasing"
        );
        Ok(())
    }
}

/// Any subset of [`SweepConfig`] read from a TOML file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub mode: Option<Mode>,
    #[serde(rename = "L")]
    pub size: Option<f64>,
    #[serde(rename = "L_list")]
    pub sizes: Option<Vec<f64>>,
    pub eps: Option<GridRange>,
    pub phi: Option<GridRange>,
    pub ncut: Option<usize>,
    pub ncut_list: Option<Vec<usize>>,
    pub method: Option<MethodSelection>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl PartialConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set here replace those in `base`.
    pub fn apply(self, base: SweepConfig) -> Result<SweepConfig> {
        if let Some(m) = self.mode {
            ensure!(m == base.mode, "config file mode {m} does not match subcommand {}", base.mode);
        }
        Ok(SweepConfig {
            mode: base.mode,
            size: self.size.unwrap_or(base.size),
            sizes: self.sizes.unwrap_or(base.sizes),
            eps: self.eps.unwrap_or(base.eps),
            phi: self.phi.unwrap_or(base.phi),
            ncut: self.ncut.unwrap_or(base.ncut),
            ncut_list: self.ncut_list.unwrap_or(base.ncut_list),
            method: self.method.unwrap_or(base.method),
            threads: self.threads.unwrap_or(base.threads),
            out: self.out.unwrap_or(base.out),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid() {
        let g: GridRange = "0.9:1.3:201".parse().unwrap();
        assert_eq!(g, GridRange::new(0.9, 1.3, 201));
        assert_eq!(g.points().len(), 201);
        assert!("1:2".parse::<GridRange>().is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        let mut c = SweepConfig::defaults(Mode::Qgt);
        c.eps = GridRange::new(1.3, 0.9, 10);
        assert!(c.validate().is_err());
        c.eps = GridRange::new(0.9, 1.3, 0);
        assert!(c.validate().is_err());
        let mut c = SweepConfig::defaults(Mode::Qgt);
        c.threads = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn file_overrides_defaults() {
        let p: PartialConfig = toml::from_str(
            "L_list = [100, 200]\nncut = 300\nmethod = \"both\"\n[eps]\nmin = 0.1\nmax = 0.5\nsteps = 5\n",
        )
        .unwrap();
        let c = p.apply(SweepConfig::defaults(Mode::Qgt)).unwrap();
        assert_eq!(c.sizes, vec![100.0, 200.0]);
        assert_eq!(c.ncut, 300);
        assert_eq!(c.method, MethodSelection::Both);
        assert_eq!(c.eps.steps, 5);
        assert!(toml::from_str::<PartialConfig>("bogus = 1").is_err());
        let wrong: PartialConfig = toml::from_str("mode = \"k0\"").unwrap();
        assert!(wrong.apply(SweepConfig::defaults(Mode::Qgt)).is_err());
    }
}
