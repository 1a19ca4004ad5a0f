//! Mesh → ITE solve → Herglotz fit → scattering, as library calls. The
//! command wrappers in `commands` add the file output.

use cloaksim_core::fem::{build_dofmap, DofMap};
use cloaksim_core::geometry::{generate_mesh, Mesh};
use cloaksim_core::herglotz::{fit_eigenfunction, EigenfunctionFit};
use cloaksim_core::ite::{assemble_blocks, solve_complex_near, solve_near, solve_smallest, BlockSystem, EigenPair};
use cloaksim_core::scatter::{scatter, MediumMode, MediumSpec, RatioRow, ScatterProblem, ScatterSolution};
use cloaksim_core::{par, CavityBc, C64};

use crate::config::{RunConfig, Selection};
use crate::{Error, Result};

/// The discretised cavity problem and its selected eigenpairs.
pub struct IteRun {
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub system: BlockSystem,
    pub pairs: Vec<EigenPair>,
}

pub fn ite_system(cfg: &RunConfig) -> Result<(Mesh, DofMap, BlockSystem)> {
    let mesh = generate_mesh(&cfg.geometry.spec(), cfg.fem.h, false)?;
    let dofmap = build_dofmap(&mesh, cfg.fem.degree()?, cfg.ite.cavity_bc)?;
    let system = assemble_blocks(&mesh, &dofmap, cfg.ite.n_c)?;
    log::info!(
        "[cli] ITE pencil: {} triangles, dimension {}, {} cavity, h = {}",
        mesh.triangles.len(),
        system.dim(),
        cfg.ite.cavity_bc,
        cfg.fem.h
    );
    Ok((mesh, dofmap, system))
}

pub fn run_ite(cfg: &RunConfig) -> Result<IteRun> {
    cfg.validate()?;
    let (mesh, dofmap, system) = ite_system(cfg)?;
    let target = C64::new(cfg.ite.target, 0.0);
    let pairs = match cfg.ite.resolved_selection() {
        Selection::Near => solve_near(&system, target, cfg.ite.count)?,
        Selection::Smallest => solve_smallest(&system, cfg.ite.count)?,
        Selection::ComplexNear => solve_complex_near(&system, target, cfg.ite.count)?,
        Selection::Auto => unreachable!("resolved above"),
    };
    Ok(IteRun { mesh, dofmap, system, pairs })
}

/// Result of the cloaking pipeline for every requested mode.
pub struct CloakRun {
    /// κ the eigenpair was searched near, if one was given.
    pub target: Option<f64>,
    /// The FEM eigenvalue used as wavenumber.
    pub kappa: f64,
    pub fit: EigenfunctionFit,
    pub rows: Vec<RatioRow>,
    pub solutions: Vec<(ScatterProblem, ScatterSolution)>,
}

/// Real eigenpair nearest `scatter.kappa`, or the first real one of the
/// configured ITE selection when no κ is given.
pub fn select_pair(cfg: &RunConfig, system: &BlockSystem) -> Result<EigenPair> {
    let pairs = match cfg.scatter.kappa {
        Some(k) => solve_near(system, C64::new(k, 0.0), 4)?,
        None => match cfg.ite.resolved_selection() {
            Selection::Smallest => solve_smallest(system, cfg.ite.count.max(1))?,
            _ => solve_near(system, C64::new(cfg.ite.target, 0.0), cfg.ite.count.max(4))?,
        },
    };
    pairs
        .into_iter()
        .find(|p| !p.is_complex())
        .ok_or_else(|| Error::Config("no real eigenvalue near the requested κ".into()))
}

pub fn medium(cfg: &RunConfig, mode: MediumMode) -> Result<MediumSpec> {
    Ok(if mode.is_idealized() {
        MediumSpec::idealized(mode, cfg.ite.n_c)?
    } else {
        MediumSpec::lossy(mode, cfg.lossy.params(), cfg.ite.n_c)?
    })
}

/// The cavity condition a mode realises.
pub fn mode_bc(mode: MediumMode) -> Option<CavityBc> {
    match mode {
        MediumMode::IdealizedDirichlet | MediumMode::Lossy1 => Some(CavityBc::Dirichlet),
        MediumMode::IdealizedNeumann | MediumMode::Lossy2 => Some(CavityBc::Neumann),
        MediumMode::Penetrable => None,
    }
}

pub fn run_cloak(cfg: &RunConfig) -> Result<CloakRun> {
    cfg.validate()?;
    if cfg.scatter.modes.is_empty() {
        return Err(Error::Config("scatter.modes is empty".into()));
    }
    for &m in &cfg.scatter.modes {
        if mode_bc(m) != Some(cfg.ite.cavity_bc) {
            log::warn!("[cli] mode {m} is paired with a {} ITE eigenfunction", cfg.ite.cavity_bc);
        }
    }
    let (mesh, dofmap, system) = ite_system(cfg)?;
    let pair = select_pair(cfg, &system)?;
    let kappa = pair.kappa.re;
    log::info!("[cli] eigenvalue κ_h = {kappa:.6} (residual {:.1e})", pair.residual);
    let curve = cfg.geometry.outer.scaled(cfg.herglotz.gamma_prime_scale);
    let fit = fit_eigenfunction(&pair, &system, &mesh, &dofmap, &curve, cfg.herglotz.fit())?;
    if fit.kernel.fit_residual > cfg.herglotz.fit_warn {
        log::warn!(
            "[cli] Herglotz fit residual {:.3e} above {:.1e}; the ratio is still reported",
            fit.kernel.fit_residual,
            cfg.herglotz.fit_warn
        );
    }
    let spec = cfg.geometry.spec();
    let degree = cfg.fem.degree()?;
    let mut rows = Vec::new();
    let mut solutions = Vec::new();
    for &mode in &cfg.scatter.modes {
        let problem = ScatterProblem::with_pml(&spec, cfg.fem.h, degree, medium(cfg, mode)?, cfg.pml(), kappa)?;
        let solution = scatter(&problem, &fit.kernel)?;
        rows.push(RatioRow {
            kappa,
            mode,
            ratio: solution.ratio,
            fit_residual: fit.kernel.fit_residual,
            dofs: problem.dofmap.len(),
            h: cfg.fem.h,
        });
        solutions.push((problem, solution));
    }
    Ok(CloakRun { target: cfg.scatter.kappa, kappa, fit, rows, solutions })
}

/// Parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    H,
    Tau,
    NA,
    R,
    M,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" => Ok(Axis::H),
            "tau" => Ok(Axis::Tau),
            "n_a" => Ok(Axis::NA),
            "r" => Ok(Axis::R),
            "M" | "m" => Ok(Axis::M),
            _ => Err(Error::Config(format!("unknown sweep axis '{s}', expected h, tau, n_a, r or M"))),
        }
    }
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::H => "h",
            Axis::Tau => "tau",
            Axis::NA => "n_a",
            Axis::R => "r",
            Axis::M => "M",
        }
    }

    pub fn apply(self, cfg: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut c = cfg.clone();
        match self {
            Axis::H => c.fem.h = value,
            Axis::Tau => c.lossy.tau = value,
            Axis::NA => c.lossy.n_a = value,
            Axis::R => c.herglotz.r = value,
            Axis::M => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::Config(format!("M must be a positive integer, got {value}")));
                }
                c.herglotz.directions = value as usize;
            }
        }
        Ok(c)
    }
}

/// Outcome of one sweep point.
pub enum SweepOutcome {
    Ite(Vec<EigenPair>),
    Cloak(Vec<RatioRow>),
}

/// One pipeline run per value, concurrently; results keep the input order. A
/// configuration without scatter modes runs the ITE stage only.
pub fn run_sweep(cfg: &RunConfig, axis: Axis, values: &[f64]) -> Result<Vec<(f64, Result<SweepOutcome>)>> {
    let ite_only = cfg.scatter.modes.is_empty();
    if ite_only && axis != Axis::H {
        return Err(Error::Config(format!("axis {} needs scatter modes in the configuration", axis.name())));
    }
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let results = par::map(values, |&v| {
        let out = axis.apply(cfg, v).and_then(|c| {
            if ite_only {
                run_ite(&c).map(|r| SweepOutcome::Ite(r.pairs))
            } else {
                run_cloak(&c).map(|r| SweepOutcome::Cloak(r.rows))
            }
        });
        if let Err(e) = &out {
            log::warn!("[cli] sweep {} = {v}: {e}", axis.name());
        }
        (v, out)
    });
    Ok(results)
}

/// Sweep CSV. ITE sweeps have one row per value with κ₁…κ_n (complex values as
/// `a+bi`); cloak sweeps have one row per value and mode. Failed runs keep
/// their row with the error in `status`.
pub fn sweep_csv(axis: Axis, count: usize, results: &[(f64, Result<SweepOutcome>)], ite_only: bool) -> String {
    let mut out = String::new();
    if ite_only {
        out.push_str(&format!("{},status", axis.name()));
        for i in 1..=count {
            out.push_str(&format!(",kappa_{i}"));
        }
    } else {
        out.push_str(&format!("{},status,mode,kappa,ratio,fit_residual,dofs", axis.name()));
    }
    out.push('\n');
    for (v, r) in results {
        match r {
            Ok(SweepOutcome::Ite(pairs)) => {
                out.push_str(&format!("{v},ok"));
                for p in pairs {
                    out.push(',');
                    out.push_str(&format_kappa(p.kappa));
                }
                out.push('\n');
            }
            Ok(SweepOutcome::Cloak(rows)) => {
                for row in rows {
                    out.push_str(&format!(
                        "{v},ok,{},{:.9},{:.9},{:.3e},{}\n",
                        row.mode, row.kappa, row.ratio, row.fit_residual, row.dofs
                    ));
                }
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                out.push_str(&format!("{v},error: {msg}\n"));
            }
        }
    }
    out
}

pub fn format_kappa(k: C64) -> String {
    if k.im.abs() <= 1e-6 * k.norm() {
        format!("{:.6}", k.re)
    } else {
        format!("{:.6}{:+.6}i", k.re, k.im)
    }
}
