//! Command entry points: run a pipeline stage and write its files into the
//! output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use cloaksim_core::geometry::{export_mesh, generate_mesh, Mesh, Region};
use cloaksim_core::ite::{write_eigenvalues_csv, EigenPair};
use cloaksim_core::scatter::{export_fields, write_ratio_report, GridSpec};

use crate::config::RunConfig;
use crate::pipeline::{run_cloak, run_ite, run_sweep, sweep_csv, Axis, CloakRun};
use crate::validate::{run_validate, Check, ValidateOptions};
use crate::Result;

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Stores the effective configuration next to the outputs.
pub fn write_config(cfg: &RunConfig) -> Result<()> {
    let mut f = create(&cfg.output_dir, "config.toml")?;
    f.write_all(cfg.to_toml()?.as_bytes())?;
    Ok(())
}

/// `eigenvalues.csv`.
pub fn cmd_ite(cfg: &RunConfig) -> Result<Vec<EigenPair>> {
    let run = run_ite(cfg)?;
    write_config(cfg)?;
    let mut f = create(&cfg.output_dir, "eigenvalues.csv")?;
    write_eigenvalues_csv(&run.pairs, &mut f)?;
    f.flush()?;
    Ok(run.pairs)
}

/// `ratio.csv`, `kernel.csv` and, when `scatter.grid_n > 0`, one
/// `fields_<mode>.csv` per mode.
pub fn cmd_cloak(cfg: &RunConfig) -> Result<CloakRun> {
    let run = run_cloak(cfg)?;
    write_config(cfg)?;
    let mut f = create(&cfg.output_dir, "ratio.csv")?;
    write_ratio_report(&run.rows, &mut f)?;
    f.flush()?;
    let mut f = create(&cfg.output_dir, "kernel.csv")?;
    run.fit.kernel.write_csv(&mut f)?;
    f.flush()?;
    if cfg.scatter.grid_n > 0 {
        let grid = GridSpec::square(cfg.geometry.box_halfwidth, cfg.scatter.grid_n);
        for (problem, solution) in &run.solutions {
            let mut f = create(&cfg.output_dir, &format!("fields_{}.csv", problem.medium.mode))?;
            export_fields(problem, solution, &grid, &mut f)?;
            f.flush()?;
        }
    }
    Ok(run)
}

/// `sweep_<axis>.csv`; returns its text.
pub fn cmd_sweep(cfg: &RunConfig, axis: Axis, values: &[f64]) -> Result<String> {
    let results = run_sweep(cfg, axis, values)?;
    let csv = sweep_csv(axis, cfg.ite.count, &results, cfg.scatter.modes.is_empty());
    write_config(cfg)?;
    let mut f = create(&cfg.output_dir, &format!("sweep_{}.csv", axis.name()))?;
    f.write_all(csv.as_bytes())?;
    f.flush()?;
    Ok(csv)
}

/// `mesh.txt` plus a summary on the log.
pub fn cmd_mesh(cfg: &RunConfig, exterior: bool) -> Result<Mesh> {
    cfg.validate()?;
    let mut spec = cfg.geometry.spec();
    if exterior && spec.core.is_none() && cfg.scatter.modes.iter().any(|m| !m.is_idealized()) {
        spec = spec.with_core(spec.default_core());
    }
    let mesh = generate_mesh(&spec, cfg.fem.h, exterior)?;
    fs::create_dir_all(&cfg.output_dir)?;
    export_mesh(&mesh, cfg.output_dir.join("mesh.txt"))?;
    log::info!(
        "[cli] mesh: {} nodes, {} triangles, min angle {:.1}°, max edge {:.3}",
        mesh.nodes.len(),
        mesh.triangles.len(),
        mesh.min_angle_deg(),
        mesh.max_edge_length()
    );
    for r in [Region::Core, Region::Lossy, Region::Shell, Region::Exterior, Region::Pml] {
        if mesh.regions.contains(&r) {
            log::info!("[cli] region {}: area {:.6}", r.keyword(), mesh.region_area(r));
        }
    }
    Ok(mesh)
}

pub fn cmd_validate(opts: &ValidateOptions) -> Vec<Check> {
    run_validate(opts)
}
