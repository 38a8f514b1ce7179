use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use kerr_qgt_cli::plots::emit_plots;
use kerr_qgt_cli::{execute, GridRange, MethodSelection, Mode, Outcome, PartialConfig, SweepConfig};

#[derive(Parser)]
#[command(name = "kerr-qgt", version, about = "Ground-state geometry sweeps for the driven Kerr resonator")]
struct Cli {
    /// Worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with any subset of the run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Rerun even if a matching complete manifest exists
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Sizes {
    /// Comma-separated L values
    #[arg(long = "L-list", value_delimiter = ',')]
    sizes: Option<Vec<f64>>,
    /// Fock cutoff
    #[arg(long)]
    ncut: Option<usize>,
    /// eps grid as min:max:steps
    #[arg(long)]
    eps: Option<GridRange>,
}

#[derive(Subcommand)]
enum Command {
    /// Rescaled photon number over (eps, phi) at fixed L
    PhaseDiagram {
        #[arg(long = "L")]
        size: Option<f64>,
        #[arg(long)]
        eps: Option<GridRange>,
        /// phi grid as min:max:steps
        #[arg(long)]
        phi: Option<GridRange>,
        #[arg(long)]
        ncut: Option<usize>,
    },
    /// QGT components over an eps grid for each L
    Qgt {
        #[command(flatten)]
        sizes: Sizes,
        /// Drive phase
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodSelection>,
    },
    /// Critical point, exponents and scaling dimensions
    Scaling {
        #[command(flatten)]
        sizes: Sizes,
    },
    /// Data collapse of the g_ee and F_ep families
    Collapse {
        #[command(flatten)]
        sizes: Sizes,
    },
    /// Cutoff scaling at K = 0 and photon-number relations
    K0 {
        /// Comma-separated cutoffs for the K = 0 points
        #[arg(long = "ncut-list", value_delimiter = ',')]
        ncut_list: Option<Vec<usize>>,
        #[command(flatten)]
        sizes: Sizes,
    },
    /// Plot scripts for every completed run in the output directory
    Plots,
}

fn flags(cli: &Cli) -> (Option<Mode>, PartialConfig) {
    let mut p = PartialConfig { threads: cli.threads, out: cli.out.clone(), ..Default::default() };
    let sized = |p: &mut PartialConfig, s: &Sizes| {
        p.sizes = s.sizes.clone();
        p.ncut = s.ncut;
        p.eps = s.eps;
    };
    let mode = match &cli.command {
        Command::PhaseDiagram { size, eps, phi, ncut } => {
            p.size = *size;
            p.eps = *eps;
            p.phi = *phi;
            p.ncut = *ncut;
            Some(Mode::PhaseDiagram)
        }
        Command::Qgt { sizes, phi, method } => {
            sized(&mut p, sizes);
            p.phi = phi.map(GridRange::single);
            p.method = *method;
            Some(Mode::Qgt)
        }
        Command::Scaling { sizes } => {
            sized(&mut p, sizes);
            Some(Mode::Scaling)
        }
        Command::Collapse { sizes } => {
            sized(&mut p, sizes);
            Some(Mode::Collapse)
        }
        Command::K0 { ncut_list, sizes } => {
            sized(&mut p, sizes);
            p.ncut_list = ncut_list.clone();
            Some(Mode::K0)
        }
        Command::Plots => None,
    };
    (mode, p)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (mode, cli_flags) = flags(&cli);
    let file = cli.config.as_deref().map(PartialConfig::load).transpose()?;

    let Some(mode) = mode else {
        let out = cli
            .out
            .clone()
            .or_else(|| file.as_ref().and_then(|f| f.out.clone()))
            .unwrap_or_else(|| SweepConfig::defaults(Mode::Scaling).out);
        for p in emit_plots(&out)? {
            println!("{}", p.display());
        }
        return Ok(());
    };

    let mut config = SweepConfig::defaults(mode);
    if let Some(f) = file {
        config = f.apply(config)?;
    }
    config = cli_flags.apply(config)?;

    match execute(&config, cli.force)? {
        Outcome::UpToDate(_) => {
            println!("{} outputs in {} are up to date (use --force to rerun)", mode, config.out.display());
        }
        Outcome::Completed(m) => {
            for o in &m.outputs {
                println!("{}", config.out.join(&o.file).display());
            }
            if !m.warnings.is_empty() {
                eprintln!("{} point warnings recorded in the manifest", m.warnings.len());
            }
        }
    }
    Ok(())
}
