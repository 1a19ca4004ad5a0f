//! Self-checks of the numerical building blocks: element matrices, Bessel
//! identities, mesh areas, Galerkin symmetry, Herglotz derivatives and
//! optimality, eigen residuals, and cross-validation against the radial and
//! Mie oracles.

use std::f64::consts::PI;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cloaksim_core::fem::{assemble, build_dofmap, element_matrices, Degree, Form};
use cloaksim_core::geometry::{generate_mesh, GeometrySpec, Region};
use cloaksim_core::herglotz::{
    build_collocation, direction_quadrature, solve_kernel, HerglotzKernel, Incident, PlaneWave,
};
use cloaksim_core::ite::{assemble_blocks, residual, solve_near, solve_smallest, RESIDUAL_TOL};
use cloaksim_core::oracles::{bessel_j_all, bessel_y_all, mie_scatter, radial_ite_roots, MieKind, RadialProblem};
use cloaksim_core::scatter::{
    assemble_scatter, gamma_points, sample_on_gamma, scatter, Coefficients, MediumMode, MediumSpec, ScatterProblem,
};
use cloaksim_core::{CavityBc, C64};

#[derive(Clone, Copy, Debug, Default)]
pub struct ValidateOptions {
    /// Only the sub-second checks.
    pub quick: bool,
    /// Relative perturbation injected into every computed mass matrix before
    /// it is compared. Zero in normal runs; the suite must fail otherwise.
    pub mass_perturbation: f64,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckFn = fn(&ValidateOptions) -> Result<String, String>;

const QUICK: [(&str, CheckFn); 9] = [
    ("element_p1_matrices", element_p1),
    ("element_p2_matrices", element_p2),
    ("global_mass_area", global_mass_area),
    ("bessel_identities", bessel_identities),
    ("mesh_region_areas", mesh_region_areas),
    ("galerkin_symmetry", galerkin_symmetry),
    ("herglotz_gradient", herglotz_gradient),
    ("tikhonov_optimality", tikhonov_optimality),
    ("eigen_residuals", eigen_residuals),
];

const FULL: [(&str, CheckFn); 3] = [
    ("oracle_dirichlet_fem", oracle_dirichlet),
    ("oracle_neumann_fem", oracle_neumann),
    ("mie_pml", mie_pml),
];

pub fn run_validate(opts: &ValidateOptions) -> Vec<Check> {
    let mut checks: Vec<(&str, CheckFn)> = QUICK.to_vec();
    if !opts.quick {
        checks.extend(FULL);
    }
    checks
        .into_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let r = f(opts);
            let seconds = t.elapsed().as_secs_f64();
            let (passed, detail) = match r {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            log::info!("[validate] {} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
            Check { name, passed, detail, seconds }
        })
        .collect()
}

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn core_err(e: cloaksim_core::Error) -> String {
    e.to_string()
}

/// Unit right triangle: K = ½[[2,−1,−1],[−1,1,0],[−1,0,1]], M = (1/24)[[2,1,1],[1,2,1],[1,1,2]].
fn element_p1(o: &ValidateOptions) -> Result<String, String> {
    let m = element_matrices([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], Degree::P1, 1.0).map_err(core_err)?;
    let k_ref = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
    let mut err = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            let mref = if a == b { 2.0 / 24.0 } else { 1.0 / 24.0 };
            err = err.max((m.mass[a][b] * (1.0 + o.mass_perturbation) - mref).abs());
            err = err.max((m.stiffness[a][b] - k_ref[a][b]).abs());
        }
    }
    ensure(err <= 1e-14, format!("max entry error {err:.1e}"))
}

/// Scaled P2 triangle: vertex mass area/30, edge mass 8·area/45, total area,
/// stiffness rows summing to zero.
fn element_p2(o: &ValidateOptions) -> Result<String, String> {
    let v = [[0.3, -0.2], [1.4, 0.1], [0.5, 0.9]];
    let m = element_matrices(v, Degree::P2, 1.0).map_err(core_err)?;
    let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
    let s = 1.0 + o.mass_perturbation;
    let mut err = 0.0f64;
    let mut total = 0.0;
    for a in 0..6 {
        let want = if a < 3 { area / 30.0 } else { 8.0 * area / 45.0 };
        err = err.max((m.mass[a][a] * s - want).abs() / area);
        err = err.max(m.stiffness[a][..6].iter().sum::<f64>().abs());
        total += m.mass[a][..6].iter().sum::<f64>() * s;
    }
    err = err.max((total - area).abs() / area);
    ensure(err <= 1e-13, format!("max relative error {err:.1e}"))
}

/// 1ᵀM1 equals the polygonal area of Ω.
fn global_mass_area(o: &ValidateOptions) -> Result<String, String> {
    let mesh = generate_mesh(&GeometrySpec::ellipse(), 0.2, false).map_err(core_err)?;
    let dm = build_dofmap(&mesh, Degree::P2, CavityBc::Dirichlet).map_err(core_err)?;
    let m = assemble(&mesh, &dm, Form::Mass, |_| true, |_| 1.0).map_err(core_err)?;
    let sum: f64 = m.triplets().iter().map(|t| t.2).sum::<f64>() * (1.0 + o.mass_perturbation);
    let area: f64 = (0..mesh.triangles.len()).map(|t| mesh.signed_area(t).abs()).sum();
    let err = (sum - area).abs() / area;
    ensure(err <= 1e-12, format!("relative error {err:.1e}"))
}

/// J_{m+1}Y_m − J_mY_{m+1} = 2/(πx) and J_{m−1} + J_{m+1} = (2m/x)J_m.
fn bessel_identities(_: &ValidateOptions) -> Result<String, String> {
    let mut err = 0.0f64;
    for &x in &[0.3, 1.0, 2.5, 7.0, 15.0, 40.0] {
        let j = bessel_j_all(21, x);
        let y = bessel_y_all(21, x);
        for m in 0..20 {
            let w = j[m + 1] * y[m] - j[m] * y[m + 1];
            let want = 2.0 / (PI * x);
            // Y_m grows like m!; compare relative to the products involved.
            let scale = (j[m + 1] * y[m]).abs().max((j[m] * y[m + 1]).abs()).max(want);
            err = err.max((w - want).abs() / scale);
            if m >= 1 {
                let lhs = j[m - 1] + j[m + 1];
                let rhs = 2.0 * m as f64 / x * j[m];
                err = err.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300));
            }
        }
    }
    ensure(err <= 1e-9, format!("max relative defect {err:.1e}"))
}

/// Region areas within 5h² relative of the exact ones, on every geometry.
fn mesh_region_areas(_: &ValidateOptions) -> Result<String, String> {
    let h = 0.1;
    let mut worst = 0.0f64;
    for spec in [GeometrySpec::circle(), GeometrySpec::ellipse(), GeometrySpec::square()] {
        let spec = spec.with_core(spec.default_core());
        let mesh = generate_mesh(&spec, h, true).map_err(core_err)?;
        let l = spec.box_halfwidth;
        let outer = l + spec.pml_thickness;
        let core = spec.core.expect("core set above").area();
        let exact = [
            (Region::Core, core),
            (Region::Lossy, spec.cavity.area() - core),
            (Region::Shell, spec.outer.area() - spec.cavity.area()),
            (Region::Exterior, 4.0 * l * l - spec.outer.area()),
            (Region::Pml, 4.0 * (outer * outer - l * l)),
        ];
        for (r, a) in exact {
            worst = worst.max((mesh.region_area(r) - a).abs() / a);
        }
    }
    ensure(worst <= 5.0 * h * h, format!("max relative area error {worst:.2e} (bound {:.2e})", 5.0 * h * h))
}

fn galerkin_symmetry(_: &ValidateOptions) -> Result<String, String> {
    let kappa = 2.0;
    let med = MediumSpec::lossy(MediumMode::Lossy2, Default::default(), 16.0).map_err(core_err)?;
    let p = ScatterProblem::new(&GeometrySpec::ellipse(), 0.2, Degree::P2, med, kappa).map_err(core_err)?;
    let sys = assemble_scatter(&p, &PlaneWave::new(kappa, [0.6, 0.8]).map_err(core_err)?).map_err(core_err)?;
    let e = sys.matrix.symmetry_error();
    let mesh = generate_mesh(&GeometrySpec::circle(), 0.2, false).map_err(core_err)?;
    let dm = build_dofmap(&mesh, Degree::P2, CavityBc::Dirichlet).map_err(core_err)?;
    let k = assemble(&mesh, &dm, Form::Stiffness, |_| true, |_| 1.0).map_err(core_err)?;
    let m = assemble(&mesh, &dm, Form::Mass, |_| true, |_| 1.0).map_err(core_err)?;
    let worst = e.max(k.symmetry_error()).max(m.symmetry_error());
    ensure(worst <= 1e-13, format!("max relative asymmetry {worst:.1e}"))
}

fn random_kernel(rng: &mut StdRng, m: usize, kappa: f64) -> Result<HerglotzKernel, String> {
    let quad = direction_quadrature(m).map_err(core_err)?;
    let g = (0..m).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    HerglotzKernel::from_coefficients(quad, g, kappa).map_err(core_err)
}

/// Analytic gradient against central differences with step 1e-5.
fn herglotz_gradient(_: &ValidateOptions) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let kappa = rng.random_range(0.5..4.0);
        let kernel = random_kernel(&mut rng, 32, kappa)?;
        let x = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
        let g = kernel.gradient(x);
        let d = 1e-5;
        for (axis, gi) in g.iter().enumerate() {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += d;
            xm[axis] -= d;
            let fd = (kernel.value(xp) - kernel.value(xm)) / (2.0 * d);
            worst = worst.max((fd - gi).norm() / gi.norm().max(1.0));
        }
    }
    ensure(worst <= 1e-6, format!("max relative difference {worst:.1e}"))
}

/// The fitted g beats random nearby trial kernels in the Tikhonov functional.
fn tikhonov_optimality(_: &ValidateOptions) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(11);
    let kappa = 2.0;
    let quad = direction_quadrature(32).map_err(core_err)?;
    let points: Vec<[f64; 2]> =
        (0..64).map(|j| (2.0 * PI * j as f64 / 64.0).sin_cos()).map(|(s, c)| [0.9 * c, 0.9 * s]).collect();
    let a = build_collocation(&points, &quad, kappa).map_err(core_err)?;
    let w: Vec<C64> = (0..points.len()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let r = 1e-3;
    let kernel = solve_kernel(&a, &w, r, &quad, kappa).map_err(core_err)?;
    let best = HerglotzKernel::tikhonov(&a, &w, &kernel.g, r);
    let mut violations = 0;
    for _ in 0..50 {
        let trial: Vec<C64> = kernel
            .g
            .iter()
            .map(|g| g + C64::new(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3)))
            .collect();
        if HerglotzKernel::tikhonov(&a, &w, &trial, r) < best {
            violations += 1;
        }
    }
    ensure(violations == 0, format!("J(g) = {best:.6e}, {violations} of 50 perturbations lower"))
}

fn eigen_residuals(_: &ValidateOptions) -> Result<String, String> {
    let mut worst = 0.0f64;
    for bc in [CavityBc::Dirichlet, CavityBc::Neumann] {
        let mesh = generate_mesh(&GeometrySpec::circle(), 0.2, false).map_err(core_err)?;
        let dm = build_dofmap(&mesh, Degree::P2, bc).map_err(core_err)?;
        let sys = assemble_blocks(&mesh, &dm, 16.0).map_err(core_err)?;
        let pairs = match bc {
            CavityBc::Dirichlet => solve_near(&sys, C64::new(1.0, 0.0), 3),
            CavityBc::Neumann => solve_smallest(&sys, 3),
        }
        .map_err(core_err)?;
        for p in &pairs {
            worst = worst.max(residual(&sys, p.lambda, &p.x));
        }
    }
    ensure(worst <= RESIDUAL_TOL, format!("max residual {worst:.1e}"))
}

fn oracle_table(bc: CavityBc, lo: f64, hi: f64, count: usize, near: Option<f64>) -> Result<Vec<f64>, String> {
    let roots = radial_ite_roots(lo, hi, 8, &RadialProblem::unit(bc, 0)).map_err(core_err)?;
    let mut k: Vec<f64> = roots.iter().flat_map(|r| std::iter::repeat(r.kappa).take(r.degeneracy as usize)).collect();
    if let Some(t) = near {
        k.sort_by(|a, b| (a * a - t * t).abs().total_cmp(&(b * b - t * t).abs()));
    }
    k.truncate(count);
    k.sort_by(f64::total_cmp);
    Ok(k)
}

fn fem_values(bc: CavityBc, h: f64, count: usize) -> Result<Vec<f64>, String> {
    let mesh = generate_mesh(&GeometrySpec::circle(), h, false).map_err(core_err)?;
    let dm = build_dofmap(&mesh, Degree::P2, bc).map_err(core_err)?;
    let sys = assemble_blocks(&mesh, &dm, 16.0).map_err(core_err)?;
    let pairs = match bc {
        CavityBc::Dirichlet => solve_near(&sys, C64::new(1.0, 0.0), count),
        CavityBc::Neumann => solve_smallest(&sys, count),
    }
    .map_err(core_err)?;
    let mut k: Vec<f64> = pairs.iter().map(|p| p.kappa.re).collect();
    k.sort_by(f64::total_cmp);
    Ok(k)
}

fn compare(fem: &[f64], oracle: &[f64], tol: f64) -> Result<String, String> {
    let worst = fem.iter().zip(oracle).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
    ensure(fem.len() == oracle.len() && worst <= tol, format!("max relative gap {worst:.2e} (bound {tol:.1e})"))
}

/// Five eigenvalues nearest 1 at h = 0.05 against the radial roots, 0.5%.
fn oracle_dirichlet(_: &ValidateOptions) -> Result<String, String> {
    let oracle = oracle_table(CavityBc::Dirichlet, 0.1, 1.5, 5, Some(1.0))?;
    compare(&fem_values(CavityBc::Dirichlet, 0.05, 5)?, &oracle, 5e-3)
}

/// Five smallest Neumann values at h = 0.05 against the radial roots, 1%.
fn oracle_neumann(_: &ValidateOptions) -> Result<String, String> {
    let oracle = oracle_table(CavityBc::Neumann, 1.0, 2.0, 5, None)?;
    compare(&fem_values(CavityBc::Neumann, 0.05, 5)?, &oracle, 1e-2)
}

/// Sound-soft (a = 0.5, κ = 3) and penetrable (n = 16, κ = 1) discs at
/// h = 0.05, relative L²(Γ) error at most 2%.
fn mie_pml(_: &ValidateOptions) -> Result<String, String> {
    let (soft, pen) = mie_errors(0.05).map_err(core_err)?;
    ensure(soft <= 0.02 && pen <= 0.02, format!("sound-soft {soft:.2e}, penetrable {pen:.2e}"))
}

/// Relative L²(Γ) errors of the sound-soft and penetrable Mie cases at mesh size `h`.
pub fn mie_errors(h: f64) -> cloaksim_core::Result<(f64, f64)> {
    let gamma = gamma_points();
    let rel = |a: &[C64], b: &[C64]| {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    };
    let soft_medium = MediumSpec::idealized(MediumMode::IdealizedDirichlet, 1.0)?;
    let p = ScatterProblem::new(&GeometrySpec::circle(), h, Degree::P2, soft_medium, 3.0)?;
    let sol = scatter(&p, &PlaneWave::new(3.0, [1.0, 0.0])?)?;
    let exact = mie_scatter(MieKind::SoundSoft, 0.5, 1.0, 3.0, [1.0, 0.0], &gamma)?;
    let soft = rel(&sample_on_gamma(&p, &sol.us)?, &exact);

    let c = Coefficients::real(1.0, 16.0);
    let p = ScatterProblem::new(&GeometrySpec::circle(), h, Degree::P2, MediumSpec::penetrable(c, c)?, 1.0)?;
    let sol = scatter(&p, &PlaneWave::new(1.0, [1.0, 0.0])?)?;
    let exact = mie_scatter(MieKind::Penetrable, 1.0, 16.0, 1.0, [1.0, 0.0], &gamma)?;
    let pen = rel(&sample_on_gamma(&p, &sol.us)?, &exact);
    Ok((soft, pen))
}
