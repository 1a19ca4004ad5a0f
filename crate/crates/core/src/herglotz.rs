//! Herglotz wave functions w(x) = Σ_i e^{iκx·ξ_i} g_i ω_i fitted to a
//! transmission eigenfunction on a closed curve Γ′ by Tikhonov-regularised
//! collocation.

use std::f64::consts::PI;
use std::io::Write;

use faer::{c64, Mat, Side};

use crate::fem::{DofMap, FieldEvaluator};
use crate::geometry::{Mesh, Shape};
use crate::ite::{extract_eigenfunctions, BlockSystem, EigenPair};
use crate::{par, Error, Result, C64};

/// Relative residual required of the normal-equation solve.
pub const NORMAL_RESIDUAL_TOL: f64 = 1e-12;

/// Γ′ is ∂Ω shrunk by this factor about the origin. The discrete trace of w_h
/// on ∂Ω itself carries a mesh-scale component from the coupled boundary rows
/// that no Helmholtz solution reproduces.
pub const GAMMA_PRIME_SCALE: f64 = 0.9;

/// Default fitting curve for an outer boundary ∂Ω.
pub fn default_gamma_prime(outer: &Shape) -> Shape {
    outer.scaled(GAMMA_PRIME_SCALE)
}

/// An incident field with its gradient.
pub trait Incident: Sync {
    fn kappa(&self) -> f64;
    fn value(&self, x: [f64; 2]) -> C64;
    fn gradient(&self, x: [f64; 2]) -> [C64; 2];
}

/// Plane wave e^{iκx·d}.
#[derive(Clone, Copy, Debug)]
pub struct PlaneWave {
    pub kappa: f64,
    pub direction: [f64; 2],
}

impl PlaneWave {
    pub fn new(kappa: f64, direction: [f64; 2]) -> Result<Self> {
        let n = direction[0].hypot(direction[1]);
        if !(kappa > 0.0) || !(n > 0.0) {
            return Err(Error::Domain("plane wave needs κ > 0 and a nonzero direction".into()));
        }
        Ok(PlaneWave { kappa, direction: [direction[0] / n, direction[1] / n] })
    }
}

impl Incident for PlaneWave {
    fn kappa(&self) -> f64 {
        self.kappa
    }

    fn value(&self, x: [f64; 2]) -> C64 {
        C64::from_polar(1.0, self.kappa * (x[0] * self.direction[0] + x[1] * self.direction[1]))
    }

    fn gradient(&self, x: [f64; 2]) -> [C64; 2] {
        let ik = C64::new(0.0, self.kappa) * self.value(x);
        [ik * self.direction[0], ik * self.direction[1]]
    }
}

/// Trapezoidal rule on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionQuadrature {
    pub theta: Vec<f64>,
    pub directions: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl DirectionQuadrature {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// θ_i = 2πi/M, ω_i = 2π/M.
pub fn direction_quadrature(m: usize) -> Result<DirectionQuadrature> {
    if m < 4 {
        return Err(Error::Herglotz(format!("need at least 4 directions, got {m}")));
    }
    let theta: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
    let directions = theta.iter().map(|t| [t.cos(), t.sin()]).collect();
    Ok(DirectionQuadrature { theta, directions, weights: vec![2.0 * PI / m as f64; m] })
}

/// Dense row-major N×M matrix.
#[derive(Clone, Debug)]
pub struct Collocation {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl Collocation {
    pub fn get(&self, j: usize, i: usize) -> C64 {
        self.data[j * self.cols + i]
    }

    pub fn apply(&self, g: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|j| self.data[j * self.cols..(j + 1) * self.cols].iter().zip(g).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// 𝒜*v.
    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (j, vj) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(&self.data[j * self.cols..(j + 1) * self.cols]) {
                *o += a.conj() * vj;
            }
        }
        out
    }
}

/// 𝒜_{j,i} = e^{iκx_j·ξ_i} ω_i.
pub fn build_collocation(points: &[[f64; 2]], quad: &DirectionQuadrature, kappa: f64) -> Result<Collocation> {
    if points.is_empty() {
        return Err(Error::Herglotz("empty collocation point set".into()));
    }
    let m = quad.len();
    let rows = par::map(points, |x| {
        quad.directions
            .iter()
            .zip(&quad.weights)
            .map(|(d, w)| C64::from_polar(*w, kappa * (x[0] * d[0] + x[1] * d[1])))
            .collect::<Vec<_>>()
    });
    Ok(Collocation { rows: points.len(), cols: m, data: rows.concat() })
}

/// Fitted kernel g on a direction quadrature.
#[derive(Clone, Debug)]
pub struct HerglotzKernel {
    pub quadrature: DirectionQuadrature,
    pub g: Vec<C64>,
    pub kappa: f64,
    pub r: f64,
    /// ‖𝒜g − W‖₂/‖W‖₂.
    pub fit_residual: f64,
    /// ‖(rI + 𝒜*𝒜)g − 𝒜*W‖₂/‖𝒜*W‖₂.
    pub normal_residual: f64,
}

impl HerglotzKernel {
    /// Kernel from given coefficients, with no fit attached.
    pub fn from_coefficients(quadrature: DirectionQuadrature, g: Vec<C64>, kappa: f64) -> Result<Self> {
        if g.len() != quadrature.len() {
            return Err(Error::Herglotz("coefficient and direction counts differ".into()));
        }
        Ok(HerglotzKernel { quadrature, g, kappa, r: 0.0, fit_residual: 0.0, normal_residual: 0.0 })
    }

    fn terms(&self, x: [f64; 2]) -> impl Iterator<Item = ([f64; 2], C64)> + '_ {
        self.quadrature.directions.iter().zip(&self.quadrature.weights).zip(&self.g).map(move |((d, w), g)| {
            (*d, C64::from_polar(*w, self.kappa * (x[0] * d[0] + x[1] * d[1])) * g)
        })
    }

    /// Tikhonov functional ‖𝒜g − W‖² + r‖g‖² for trial coefficients.
    pub fn tikhonov(a: &Collocation, w: &[C64], g: &[C64], r: f64) -> f64 {
        let ag = a.apply(g);
        let fit: f64 = ag.iter().zip(w).map(|(x, y)| (x - y).norm_sqr()).sum();
        fit + r * g.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn evaluate(&self, points: &[[f64; 2]]) -> Vec<C64> {
        par::map(points, |&x| Incident::value(self, x))
    }

    pub fn evaluate_gradient(&self, points: &[[f64; 2]]) -> Vec<[C64; 2]> {
        par::map(points, |&x| Incident::gradient(self, x))
    }

    /// `theta_i,re_g,im_g,omega_i`
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "theta_i,re_g,im_g,omega_i")?;
        for ((t, g), w) in self.quadrature.theta.iter().zip(&self.g).zip(&self.quadrature.weights) {
            writeln!(out, "{t:.15e},{:.15e},{:.15e},{w:.15e}", g.re, g.im)?;
        }
        Ok(())
    }
}

impl Incident for HerglotzKernel {
    fn kappa(&self) -> f64 {
        self.kappa
    }

    fn value(&self, x: [f64; 2]) -> C64 {
        self.terms(x).map(|(_, t)| t).sum()
    }

    fn gradient(&self, x: [f64; 2]) -> [C64; 2] {
        let ik = C64::new(0.0, self.kappa);
        self.terms(x).fold([C64::new(0.0, 0.0); 2], |acc, (d, t)| {
            [acc[0] + ik * d[0] * t, acc[1] + ik * d[1] * t]
        })
    }
}

/// Solves (rI + 𝒜*𝒜)g = 𝒜*W by Cholesky with iterative refinement.
pub fn solve_kernel(
    a: &Collocation,
    w: &[C64],
    r: f64,
    quadrature: &DirectionQuadrature,
    kappa: f64,
) -> Result<HerglotzKernel> {
    if !(r > 0.0) {
        return Err(Error::Herglotz(format!("regulariser must be positive, got {r}")));
    }
    if w.len() != a.rows || quadrature.len() != a.cols {
        return Err(Error::Herglotz("collocation, data and quadrature sizes disagree".into()));
    }
    let m = a.cols;
    let zero = C64::new(0.0, 0.0);
    let wnorm = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if wnorm == 0.0 {
        return Ok(HerglotzKernel {
            quadrature: quadrature.clone(),
            g: vec![zero; m],
            kappa,
            r,
            fit_residual: 0.0,
            normal_residual: 0.0,
        });
    }
    // K = rI + 𝒜*𝒜, accumulated row by row of 𝒜.
    let mut k = vec![zero; m * m];
    for j in 0..a.rows {
        let row = &a.data[j * m..(j + 1) * m];
        for p in 0..m {
            let ap = row[p].conj();
            for q in 0..m {
                k[p * m + q] += ap * row[q];
            }
        }
    }
    for p in 0..m {
        k[p * m + p] += r;
    }
    let kmat = Mat::<c64>::from_fn(m, m, |p, q| c64::new(k[p * m + q].re, k[p * m + q].im));
    let llt = kmat
        .llt(Side::Lower)
        .map_err(|e| Error::Herglotz(format!("normal matrix not positive definite: {e:?}")))?;
    let rhs = a.apply_adjoint(w);
    let rhs_norm = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let kmul = |g: &[C64]| -> Vec<C64> {
        (0..m).map(|p| k[p * m..(p + 1) * m].iter().zip(g).map(|(x, y)| x * y).sum()).collect()
    };
    let solve = |b: &[C64]| -> Vec<C64> {
        let mut x = Mat::<c64>::from_fn(m, 1, |i, _| c64::new(b[i].re, b[i].im));
        faer::linalg::solvers::Solve::solve_in_place(&llt, x.as_mut());
        (0..m).map(|i| C64::new(x[(i, 0)].re, x[(i, 0)].im)).collect()
    };
    let mut g = solve(&rhs);
    let residual_of = |g: &[C64]| -> (Vec<C64>, f64) {
        let res: Vec<C64> = kmul(g).iter().zip(&rhs).map(|(x, y)| y - x).collect();
        let n = res.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() / rhs_norm;
        (res, n)
    };
    let (mut res, mut normal_residual) = residual_of(&g);
    for _ in 0..5 {
        if normal_residual <= NORMAL_RESIDUAL_TOL {
            break;
        }
        let dg = solve(&res);
        let trial: Vec<C64> = g.iter().zip(&dg).map(|(a, b)| a + b).collect();
        let (tres, tn) = residual_of(&trial);
        if tn >= normal_residual {
            break;
        }
        g = trial;
        res = tres;
        normal_residual = tn;
    }
    if normal_residual > NORMAL_RESIDUAL_TOL {
        log::warn!("[herglotz] normal equation residual {normal_residual:.2e} above {NORMAL_RESIDUAL_TOL:.0e}");
    }
    let ag = a.apply(&g);
    let fit_residual = ag.iter().zip(w).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() / wnorm;
    Ok(HerglotzKernel { quadrature: quadrature.clone(), g, kappa, r, fit_residual, normal_residual })
}

/// Fit parameters: M directions, N points on Γ′, regulariser r.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub directions: usize,
    pub points: usize,
    pub r: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { directions: 64, points: 128, r: 1e-8 }
    }
}

/// Fitted kernel with diagnostics against the FEM eigenfunction.
#[derive(Clone, Debug)]
pub struct EigenfunctionFit {
    pub kernel: HerglotzKernel,
    /// Relative ℓ² difference between the Herglotz wave and w_h over the Ω DoFs.
    pub node_error: f64,
}

/// Samples w_h at N points of Γ′ (uniform in the curve parameter) and fits a
/// Herglotz kernel to them.
pub fn fit_eigenfunction(
    pair: &EigenPair,
    system: &BlockSystem,
    mesh: &Mesh,
    dofmap: &DofMap,
    curve: &Shape,
    cfg: FitConfig,
) -> Result<EigenfunctionFit> {
    if pair.kappa.im.abs() > 1e-8 * pair.kappa.norm() || !(pair.kappa.re > 0.0) {
        return Err(Error::Herglotz(format!("Herglotz fitting needs a real eigenvalue, got κ = {}", pair.kappa)));
    }
    if cfg.points == 0 {
        return Err(Error::Herglotz("need at least one point on Γ′".into()));
    }
    let kappa = pair.kappa.re;
    let f = extract_eigenfunctions(pair, system, dofmap)?;
    let ev = FieldEvaluator::new(mesh, dofmap);
    // Curve points on ∂Ω may sit just outside the polygonal mesh boundary.
    let slack = 0.5 * mesh.h * mesh.h;
    let points: Vec<[f64; 2]> = (0..cfg.points).map(|j| curve.point_at(j as f64 / cfg.points as f64)).collect();
    let mut w = Vec::with_capacity(points.len());
    for p in &points {
        let v = ev
            .value(&f.w, *p, slack)
            .ok_or_else(|| Error::Herglotz(format!("Γ′ leaves Ω at ({:.4}, {:.4})", p[0], p[1])))?;
        w.push(v);
    }
    let quad = direction_quadrature(cfg.directions)?;
    let a = build_collocation(&points, &quad, kappa)?;
    let kernel = solve_kernel(&a, &w, cfg.r, &quad, kappa)?;

    let omega: Vec<usize> = dofmap.interior.iter().chain(&dofmap.boundary).copied().collect();
    let coords: Vec<[f64; 2]> = omega.iter().map(|&d| dofmap.coords[d]).collect();
    let wg = kernel.evaluate(&coords);
    let (num, den) = omega.iter().zip(&wg).fold((0.0, 0.0), |(n, d), (&i, v)| {
        (n + (v - f.w[i]).norm_sqr(), d + f.w[i].norm_sqr())
    });
    let node_error = (num / den).sqrt();
    log::info!(
        "[herglotz] κ={kappa:.6} M={} N={} r={:.0e}: fit residual {:.3e}, node error {:.3e}",
        cfg.directions,
        cfg.points,
        cfg.r,
        kernel.fit_residual,
        node_error
    );
    Ok(EigenfunctionFit { kernel, node_error })
}
