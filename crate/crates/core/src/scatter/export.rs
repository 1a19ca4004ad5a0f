use std::io::Write;

use super::assemble::ScatterProblem;
use super::medium::MediumMode;
use super::solve::ScatterSolution;
use crate::fem::FieldEvaluator;
use crate::{Error, Result};

/// Uniform nx × ny grid over [x0, x1] × [y0, y1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(half: f64, n: usize) -> Self {
        GridSpec { x: [-half, half], y: [-half, half], nx: n, ny: n }
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        let at = |r: [f64; 2], n: usize, i: usize| {
            if n == 1 {
                r[0]
            } else {
                r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push([at(self.x, self.nx, i), at(self.y, self.ny, j)]);
            }
        }
        out
    }
}

/// Writes `x,y,re_us,im_us,re_ui,im_ui,masked`. Points inside the removed
/// cavity of an idealized mode get masked = 1 and empty field columns.
pub fn export_fields(
    problem: &ScatterProblem,
    solution: &ScatterSolution,
    grid: &GridSpec,
    out: &mut impl Write,
) -> Result<usize> {
    let l = problem.pml.box_halfwidth;
    if grid.nx == 0 || grid.ny == 0 {
        return Err(Error::Scatter("empty export grid".into()));
    }
    if grid.x.iter().chain(&grid.y).any(|c| c.abs() > l) {
        return Err(Error::Scatter(format!("export grid leaves the physical region [−{l}, {l}]²")));
    }
    let ev = FieldEvaluator::new(&problem.mesh, &problem.dofmap);
    writeln!(out, "x,y,re_us,im_us,re_ui,im_ui,masked")?;
    let mut rows = 0;
    for p in grid.points() {
        let us = ev.value(&solution.us, p, 0.0);
        let ui = ev.value(&solution.ui, p, 0.0);
        match (us, ui) {
            (Some(s), Some(i)) => {
                writeln!(out, "{},{},{:.12e},{:.12e},{:.12e},{:.12e},0", p[0], p[1], s.re, s.im, i.re, i.im)?
            }
            _ if problem.medium.mode.is_idealized() => writeln!(out, "{},{},,,,,1", p[0], p[1])?,
            _ => {
                return Err(Error::Scatter(format!("grid point {p:?} is not in the mesh")));
            }
        }
        rows += 1;
    }
    Ok(rows)
}

/// One row of the ratio report.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub kappa: f64,
    pub mode: MediumMode,
    pub ratio: f64,
    pub fit_residual: f64,
    pub dofs: usize,
    pub h: f64,
}

pub fn write_ratio_report(rows: &[RatioRow], out: &mut impl Write) -> Result<()> {
    writeln!(out, "kappa,mode,ratio,fit_residual,dofs,h")?;
    for r in rows {
        writeln!(out, "{:.9},{},{:.9},{:.3e},{},{}", r.kappa, r.mode, r.ratio, r.fit_residual, r.dofs, r.h)?;
    }
    Ok(())
}
