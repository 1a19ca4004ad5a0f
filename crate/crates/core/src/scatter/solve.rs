use std::f64::consts::PI;

use super::assemble::{assemble_scatter, ScatterProblem, ScatterSystem};
use crate::fem::FieldEvaluator;
use crate::geometry::GAMMA_RADIUS;
use crate::herglotz::Incident;
use crate::linalg::SparseLu;
use crate::{Error, Result, C64};

/// Required relative algebraic residual of the reduced system.
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// Sample count of the trapezoidal rule on Γ.
pub const GAMMA_POINTS: usize = 720;

#[derive(Clone, Debug)]
pub struct ScatterSolution {
    /// u^s at every DoF.
    pub us: Vec<C64>,
    /// Nodal interpolant of u^i.
    pub ui: Vec<C64>,
    pub kappa: f64,
    /// ‖u^s‖_{L²(Γ)} / ‖u^i‖_{L²(Γ)}.
    pub ratio: f64,
    /// Relative residual of the reduced linear system.
    pub residual: f64,
}

impl ScatterSolution {
    /// Total field u = u^s + u^i at every DoF.
    pub fn total(&self) -> Vec<C64> {
        self.us.iter().zip(&self.ui).map(|(a, b)| a + b).collect()
    }
}

/// Eliminates the constrained DoFs and solves directly.
pub fn solve_scatter(problem: &ScatterProblem, system: &ScatterSystem) -> Result<ScatterSolution> {
    let n = system.rhs.len();
    let mut value = vec![None; n];
    for &(d, v) in &system.fixed {
        value[d] = Some(v);
    }
    let free: Vec<usize> = (0..n).filter(|&d| value[d].is_none()).collect();
    let fixed: Vec<usize> = system.fixed.iter().map(|f| f.0).collect();
    let g: Vec<C64> = system.fixed.iter().map(|f| f.1).collect();

    let aff = system.matrix.submatrix(&free, &free);
    let afd = system.matrix.submatrix(&free, &fixed);
    let lift = afd.matvec(&g);
    let b: Vec<C64> = free.iter().zip(&lift).map(|(&d, l)| system.rhs[d] - l).collect();

    let lu = SparseLu::new(&aff).map_err(|e| {
        Error::Singular(format!(
            "{e}; κ = {} may hit a resonance of the truncated problem, try a nearby κ or a different PML",
            system.kappa
        ))
    })?;
    let bn = norm(&b);
    let mut x = lu.solve(&b);
    let mut residual = relative_residual(&aff, &x, &b, bn);
    for _ in 0..3 {
        if residual <= ALGEBRAIC_TOL {
            break;
        }
        let r: Vec<C64> = aff.matvec(&x).iter().zip(&b).map(|(ax, bi)| bi - ax).collect();
        let dx = lu.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
        residual = relative_residual(&aff, &x, &b, bn);
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Singular(format!("non-finite scattered field at κ = {}", system.kappa)));
    }
    if residual > ALGEBRAIC_TOL {
        log::warn!("[scatter] relative algebraic residual {residual:.2e} above {ALGEBRAIC_TOL:.0e}");
    }

    let mut us = vec![C64::new(0.0, 0.0); n];
    for (&d, v) in free.iter().zip(x) {
        us[d] = v;
    }
    for (&d, v) in fixed.iter().zip(g) {
        us[d] = v;
    }
    let ratio = scattering_ratio(problem, &us, &system.incident)?;
    log::info!(
        "[scatter] κ={:.6} mode {} DoFs {}: ratio {ratio:.6}, residual {residual:.1e}",
        system.kappa,
        problem.medium.mode,
        n
    );
    Ok(ScatterSolution { us, ui: system.incident.clone(), kappa: system.kappa, ratio, residual })
}

/// Assemble and solve.
pub fn scatter(problem: &ScatterProblem, incident: &dyn Incident) -> Result<ScatterSolution> {
    let system = assemble_scatter(problem, incident)?;
    solve_scatter(problem, &system)
}

/// The 720 equispaced points of Γ.
pub fn gamma_points() -> Vec<[f64; 2]> {
    (0..GAMMA_POINTS)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / GAMMA_POINTS as f64;
            [GAMMA_RADIUS * t.cos(), GAMMA_RADIUS * t.sin()]
        })
        .collect()
}

/// Values of a DoF vector on Γ.
pub fn sample_on_gamma(problem: &ScatterProblem, u: &[C64]) -> Result<Vec<C64>> {
    let ev = FieldEvaluator::new(&problem.mesh, &problem.dofmap);
    gamma_points()
        .into_iter()
        .map(|p| ev.value(u, p, 0.0).ok_or_else(|| Error::Scatter(format!("Γ point {p:?} is not in the mesh"))))
        .collect()
}

/// ‖u^s‖_{L²(Γ)} / ‖u^i‖_{L²(Γ)} by the trapezoidal rule; the common weight cancels.
pub fn scattering_ratio(problem: &ScatterProblem, us: &[C64], ui: &[C64]) -> Result<f64> {
    let s = sample_on_gamma(problem, us)?;
    let i = sample_on_gamma(problem, ui)?;
    let den = norm(&i);
    if den == 0.0 {
        return Err(Error::Scatter("incident field vanishes on Γ".into()));
    }
    Ok(norm(&s) / den)
}

/// ∮_Γ Im(ū ∂u/∂ν) ds and ‖u‖²_{L²(Γ)} for a DoF vector u.
pub fn flux_on_gamma(problem: &ScatterProblem, u: &[C64]) -> Result<(f64, f64)> {
    let ev = FieldEvaluator::new(&problem.mesh, &problem.dofmap);
    let ds = 2.0 * PI * GAMMA_RADIUS / GAMMA_POINTS as f64;
    let mut flux = 0.0;
    let mut mass = 0.0;
    for p in gamma_points() {
        let (v, g) = ev
            .value_and_gradient(u, p, 0.0)
            .ok_or_else(|| Error::Scatter(format!("Γ point {p:?} is not in the mesh")))?;
        let dn = (g[0] * p[0] + g[1] * p[1]) / GAMMA_RADIUS;
        flux += (v.conj() * dn).im * ds;
        mass += v.norm_sqr() * ds;
    }
    Ok((flux, mass))
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn relative_residual(a: &crate::linalg::CsrMatrix<C64>, x: &[C64], b: &[C64], bn: f64) -> f64 {
    if bn == 0.0 {
        return norm(x);
    }
    let r: Vec<C64> = a.matvec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
    norm(&r) / bn
}
