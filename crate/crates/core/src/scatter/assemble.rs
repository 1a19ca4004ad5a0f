use std::collections::HashSet;

use super::medium::{MediumMode, MediumSpec};
use super::pml::PmlConfig;
use crate::fem::{assemble_local, build_dofmap, shape_functions, Affine, Degree, DofMap};
use crate::geometry::{generate_mesh, BoundaryTag, GeometrySpec, Mesh, Region};
use crate::herglotz::Incident;
use crate::linalg::CsrMatrix;
use crate::{par, CavityBc, Error, Result, C64};

/// Mesh, discretisation and medium of one scattering computation.
#[derive(Clone, Debug)]
pub struct ScatterProblem {
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub medium: MediumSpec,
    pub pml: PmlConfig,
    pub kappa: f64,
}

impl ScatterProblem {
    /// Meshes `spec` with exterior and PML. Idealized modes drop the cavity
    /// triangles; lossy modes add the default core when `spec` has none.
    pub fn new(spec: &GeometrySpec, h: f64, degree: Degree, medium: MediumSpec, kappa: f64) -> Result<Self> {
        let pml = PmlConfig { box_halfwidth: spec.box_halfwidth, thickness: spec.pml_thickness, ..PmlConfig::default() };
        Self::with_pml(spec, h, degree, medium, pml, kappa)
    }

    /// As [`new`](Self::new) with an explicit PML profile; its box half-width
    /// and thickness replace those of `spec`.
    pub fn with_pml(
        spec: &GeometrySpec,
        h: f64,
        degree: Degree,
        medium: MediumSpec,
        pml: PmlConfig,
        kappa: f64,
    ) -> Result<Self> {
        let mut spec = GeometrySpec { box_halfwidth: pml.box_halfwidth, pml_thickness: pml.thickness, ..*spec };
        spec.validate_for_scattering()?;
        if matches!(medium.mode, MediumMode::Lossy1 | MediumMode::Lossy2) && spec.core.is_none() {
            spec = spec.with_core(spec.default_core());
        }
        let mut mesh = generate_mesh(&spec, h, true)?;
        if medium.mode.is_idealized() {
            mesh = mesh.submesh(|r| !r.in_cavity());
        }
        Self::from_mesh(mesh, degree, medium, pml, kappa)
    }

    pub fn from_mesh(mesh: Mesh, degree: Degree, medium: MediumSpec, pml: PmlConfig, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::Scatter(format!("wavenumber must be positive, got {kappa}")));
        }
        pml.validate()?;
        medium.validate()?;
        let has = |r: Region| mesh.regions.contains(&r);
        if !has(Region::Pml) || !has(Region::Exterior) || !mesh.has_tag(BoundaryTag::Box) {
            return Err(Error::Scatter("mesh has no exterior, PML or outer box boundary".into()));
        }
        let outer = pml.box_halfwidth + pml.thickness;
        let reach = mesh.nodes.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
        if (reach - outer).abs() > 1e-9 * outer {
            return Err(Error::Scatter(format!("mesh extends to {reach}, PML box ends at {outer}")));
        }
        let cavity = mesh.regions.iter().any(|r| r.in_cavity());
        if medium.mode.is_idealized() {
            if cavity {
                return Err(Error::Scatter(format!("{} needs a mesh without the cavity interior", medium.mode)));
            }
            if !mesh.has_tag(BoundaryTag::DD) {
                return Err(Error::Scatter("idealized modes need edges tagged dD".into()));
            }
        } else if !cavity {
            return Err(Error::Scatter(format!("{} needs the cavity triangles in the mesh", medium.mode)));
        }
        let dofmap = build_dofmap(&mesh, degree, CavityBc::Dirichlet)?;
        Ok(ScatterProblem { mesh, dofmap, medium, pml, kappa })
    }

    /// DoFs carrying a Dirichlet value: the outer box and, for the sound-soft
    /// cavity, ∂D.
    pub fn constrained(&self) -> Vec<usize> {
        (0..self.dofmap.len())
            .filter(|&d| {
                self.dofmap.has_tag(d, BoundaryTag::Box)
                    || (self.medium.mode == MediumMode::IdealizedDirichlet && self.dofmap.has_tag(d, BoundaryTag::DD))
            })
            .collect()
    }
}

/// Galerkin system over all DoFs before elimination.
#[derive(Clone, Debug)]
pub struct ScatterSystem {
    pub matrix: CsrMatrix<C64>,
    pub rhs: Vec<C64>,
    /// Constrained DoFs and their values.
    pub fixed: Vec<(usize, C64)>,
    /// Nodal interpolant of u^i.
    pub incident: Vec<C64>,
    pub kappa: f64,
}

/// Assembles the PML-stretched problem for u^s:
/// ∫σ(S₂/S₁ ∂₁u ∂₁φ + S₁/S₂ ∂₂u ∂₂φ) − κ²∫nS₁S₂uφ = κ²∫(n−1)u^iφ − ∫(σ−1)∇u^i·∇φ,
/// plus ∫_{∂D} ∂u^i/∂ν φ (ν out of D) for the sound-hard cavity.
pub fn assemble_scatter(problem: &ScatterProblem, incident: &dyn Incident) -> Result<ScatterSystem> {
    let kappa = problem.kappa;
    if (incident.kappa() - kappa).abs() > 1e-12 * kappa {
        return Err(Error::Scatter(format!(
            "incident wave has κ = {}, system has κ = {kappa}",
            incident.kappa()
        )));
    }
    let mesh = &problem.mesh;
    let dm = &problem.dofmap;
    let nl = dm.degree.local_dofs();
    // Degree-4 rule for both element orders: the PML profile and u^i are not polynomial.
    let rule = Degree::P2.rule();
    let k2 = kappa * kappa;

    let matrix = assemble_local(mesh, dm, |_| true, |t| {
        let map = Affine::new(mesh.vertices(t))?;
        let c = problem.medium.coefficients(mesh.regions[t]);
        let mut out = vec![C64::new(0.0, 0.0); nl * nl];
        for (xi, &w) in rule.points.iter().zip(rule.weights) {
            let (phi, g) = shape_functions(dm.degree, *xi);
            let gp = g.map(|r| map.grad(r));
            let [s1, s2] = problem.pml.stretch(map.map(*xi), kappa);
            let wj = w * map.det.abs();
            let d1 = s2 / s1 * c.sigma;
            let d2 = s1 / s2 * c.sigma;
            let react = c.n * s1 * s2 * k2;
            for a in 0..nl {
                for b in 0..nl {
                    out[a * nl + b] += (d1 * gp[a][0] * gp[b][0] + d2 * gp[a][1] * gp[b][1] - react * phi[a] * phi[b]) * wj;
                }
            }
        }
        Ok(out)
    })?;

    let forced: Vec<usize> = (0..mesh.triangles.len())
        .filter(|&t| {
            let c = problem.medium.coefficients(mesh.regions[t]);
            c.sigma != 1.0 || c.n != C64::new(1.0, 0.0)
        })
        .collect();
    let locals = par::map(&forced, |&t| -> Result<Vec<C64>> {
        let map = Affine::new(mesh.vertices(t))?;
        let c = problem.medium.coefficients(mesh.regions[t]);
        let mut out = vec![C64::new(0.0, 0.0); nl];
        for (xi, &w) in rule.points.iter().zip(rule.weights) {
            let (phi, g) = shape_functions(dm.degree, *xi);
            let x = map.map(*xi);
            let ui = incident.value(x);
            let gi = incident.gradient(x);
            let wj = w * map.det.abs();
            for a in 0..nl {
                let gp = map.grad(g[a]);
                out[a] += ((c.n - 1.0) * ui * (k2 * phi[a]) - (gi[0] * gp[0] + gi[1] * gp[1]) * (c.sigma - 1.0)) * wj;
            }
        }
        Ok(out)
    });
    let mut rhs = vec![C64::new(0.0, 0.0); dm.len()];
    for (&t, lv) in forced.iter().zip(locals) {
        for (&d, v) in dm.local(t).iter().zip(lv?) {
            rhs[d] += v;
        }
    }
    if problem.medium.mode == MediumMode::IdealizedNeumann {
        add_neumann_term(problem, incident, &mut rhs)?;
    }

    let ui: Vec<C64> = par::map(&dm.coords, |&x| incident.value(x));
    let fixed = problem
        .constrained()
        .into_iter()
        .map(|d| {
            let v = if dm.has_tag(d, BoundaryTag::Box) { C64::new(0.0, 0.0) } else { -ui[d] };
            (d, v)
        })
        .collect();
    log::debug!("[scatter] assembled {} DoFs, {} nonzeros, mode {}", dm.len(), matrix.nnz(), problem.medium.mode);
    Ok(ScatterSystem { matrix, rhs, fixed, incident: ui, kappa })
}

/// ∫_{∂D} (∂u^i/∂ν) φ with a 3-point Gauss rule on each straight ∂D edge.
fn add_neumann_term(problem: &ScatterProblem, incident: &dyn Incident, rhs: &mut [C64]) -> Result<()> {
    let mesh = &problem.mesh;
    let dm = &problem.dofmap;
    let tagged: HashSet<(usize, usize)> = mesh
        .edges
        .iter()
        .zip(&mesh.edge_tags)
        .filter(|(_, t)| **t == BoundaryTag::DD)
        .map(|(e, _)| (e[0].min(e[1]), e[0].max(e[1])))
        .collect();
    let reference = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let g = (0.6f64).sqrt() * 0.5;
    let gauss = [(0.5 - g, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + g, 5.0 / 18.0)];
    let mut found = 0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            if !tagged.contains(&(tri[a].min(tri[b]), tri[a].max(tri[b]))) {
                continue;
            }
            found += 1;
            let (p, q) = (mesh.nodes[tri[a]], mesh.nodes[tri[b]]);
            let e = [q[0] - p[0], q[1] - p[1]];
            let len = e[0].hypot(e[1]);
            let mut nu = [e[1] / len, -e[0] / len];
            // The triangle lies outside D, so ν out of D points into it.
            let c = mesh.centroid(t);
            if nu[0] * (c[0] - p[0]) + nu[1] * (c[1] - p[1]) < 0.0 {
                nu = [-nu[0], -nu[1]];
            }
            for (s, w) in gauss {
                let xi = [
                    (1.0 - s) * reference[a][0] + s * reference[b][0],
                    (1.0 - s) * reference[a][1] + s * reference[b][1],
                ];
                let x = [p[0] + s * e[0], p[1] + s * e[1]];
                let gi = incident.gradient(x);
                let dn = gi[0] * nu[0] + gi[1] * nu[1];
                let (phi, _) = shape_functions(dm.degree, xi);
                for (&d, f) in dm.local(t).iter().zip(phi) {
                    rhs[d] += dn * (f * w * len);
                }
            }
        }
    }
    if found == 0 {
        return Err(Error::Scatter("no triangle borders ∂D".into()));
    }
    Ok(())
}
