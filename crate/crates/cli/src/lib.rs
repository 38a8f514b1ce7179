//! Sweep runner behind the `kerr-qgt` binary: configuration, parallel grid
//! evaluation, CSV/JSON outputs with run manifests, and plot scripts.

pub mod config;
pub mod manifest;
pub mod output;
pub mod plots;
pub mod run;

pub use config::{GridRange, MethodSelection, Mode, PartialConfig, SweepConfig};
pub use manifest::RunManifest;
pub use run::{execute, Outcome};
