use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cloaksim::commands::{cmd_cloak, cmd_ite, cmd_mesh, cmd_sweep, cmd_validate};
use cloaksim::pipeline::{format_kappa, Axis};
use cloaksim::presets;
use cloaksim::validate::ValidateOptions;
use cloaksim::{Error, RunConfig};
use cloaksim_core::scatter::MediumMode;
use cloaksim_core::CavityBc;

#[derive(Parser)]
#[command(name = "cloaksim", version, about = "Near-invisibility cloaking via interior transmission eigenfunctions")]
struct Cli {
    /// Log filter (error, warn, info, debug); RUST_LOG takes precedence.
    #[arg(long, global = true, default_value = "info")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interior transmission eigenvalues → eigenvalues.csv.
    Ite(Common),
    /// Eigenfunction → Herglotz wave → scattering ratio and field dumps.
    Cloak(Common),
    /// Self-check suite; exits nonzero on any failure.
    Validate {
        /// Only the sub-second checks.
        #[arg(long)]
        quick: bool,
        /// Relative error injected into every mass matrix (mutation test hook).
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_mass: f64,
    },
    /// One pipeline run per value of a parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// h, tau, n_a, r or M.
        #[arg(long)]
        axis: Axis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Mesh the geometry → mesh.txt.
    Mesh {
        #[command(flatten)]
        common: Common,
        /// Include the exterior box and PML.
        #[arg(long)]
        exterior: bool,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration; its keys override the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// table1..table5 or fig1..fig12.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    h: Option<f64>,
    /// Element degree, 1 or 2.
    #[arg(long)]
    degree: Option<u32>,
    /// Cavity condition: dirichlet or neumann.
    #[arg(long, value_parser = parse_bc)]
    bc: Option<CavityBc>,
    /// Wavenumber near which the eigenpair for the cloak is taken.
    #[arg(long)]
    kappa: Option<f64>,
    /// Scatter modes, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_mode)]
    mode: Vec<MediumMode>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    n_a: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any key as section.key=value, e.g. herglotz.r=1e-10.
    #[arg(long = "set")]
    set: Vec<String>,
}

fn parse_bc(s: &str) -> Result<CavityBc, String> {
    s.parse().map_err(|e: cloaksim_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<MediumMode, String> {
    s.parse().map_err(|e: cloaksim_core::Error| e.to_string())
}

impl Common {
    /// Defaults, then the preset, then the file, then the flags.
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::default();
        if let Some(p) = &self.preset {
            cfg = presets::apply(p, &cfg)?;
        }
        if let Some(path) = &self.config {
            cfg = cfg.merge_file(path)?;
        }
        if let Some(h) = self.h {
            cfg.fem.h = h;
        }
        if let Some(p) = self.degree {
            cfg.fem.degree = p;
        }
        if let Some(bc) = self.bc {
            cfg.ite.cavity_bc = bc;
        }
        if let Some(k) = self.kappa {
            cfg.scatter.kappa = Some(k);
        }
        if !self.mode.is_empty() {
            cfg.scatter.modes = self.mode.clone();
        }
        if let Some(t) = self.tau {
            cfg.lossy.tau = t;
        }
        if let Some(n) = self.n_a {
            cfg.lossy.n_a = n;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        for s in &self.set {
            cfg = cfg.set(s)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Ite(common) => {
            let cfg = common.resolve()?;
            let pairs = cmd_ite(&cfg)?;
            for p in &pairs {
                writeln!(out, "{}  residual {:.1e}", format_kappa(p.kappa), p.residual)?;
            }
        }
        Command::Cloak(common) => {
            let cfg = common.resolve()?;
            let run = cmd_cloak(&cfg)?;
            for r in &run.rows {
                writeln!(
                    out,
                    "{} κ = {:.6}: ratio {:.6}, fit residual {:.3e}, {} DoFs",
                    r.mode, r.kappa, r.ratio, r.fit_residual, r.dofs
                )?;
            }
        }
        Command::Validate { quick, perturb_mass } => {
            let checks = cmd_validate(&ValidateOptions { quick, mass_perturbation: perturb_mass });
            let mut ok = true;
            for c in &checks {
                writeln!(
                    out,
                    "{} {} ({:.2} s): {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.seconds,
                    c.detail
                )?;
                ok &= c.passed;
            }
            return Ok(ok);
        }
        Command::Sweep { common, axis, values } => {
            let cfg = common.resolve()?;
            let csv = cmd_sweep(&cfg, axis, &values)?;
            out.write_all(csv.as_bytes())?;
            return Ok(!csv.contains(",error: "));
        }
        Command::Mesh { common, exterior } => {
            let cfg = common.resolve()?;
            let mesh = cmd_mesh(&cfg, exterior)?;
            writeln!(out, "{} nodes, {} triangles", mesh.nodes.len(), mesh.triangles.len())?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(&cli.log_level))
        .format(|buf, record| writeln!(buf, "{:<5} {}", record.level(), record.args()))
        .init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            log::error!("[cli] {e}");
            ExitCode::FAILURE
        }
    }
}
