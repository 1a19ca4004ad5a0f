use std::collections::HashMap;

use super::element::Degree;
use crate::geometry::{BoundaryTag, Mesh, Region};
use crate::{CavityBc, Error, Result};

/// Global numbering of Lagrange DoFs and the index sets of the cavity problem.
///
/// DoFs 0..nodes are the mesh vertices; for P2 the edge midpoints follow in
/// order of first appearance over the triangles. Index sets refer to Ω only:
/// `interior` is S_h⁰ (Ω DoFs off ∂Ω), `boundary` is S_h^B (DoFs on ∂Ω) and
/// `v_space` is the shell space S_h^D (Dirichlet: off ∂Ω and ∂D) or its
/// Neumann analogue (off ∂Ω only).
#[derive(Clone, Debug)]
pub struct DofMap {
    pub degree: Degree,
    pub cavity_bc: CavityBc,
    pub coords: Vec<[f64; 2]>,
    /// Local-to-global map per triangle; only the first `degree.local_dofs()` entries are used.
    pub cells: Vec<[usize; 6]>,
    /// [`BoundaryTag::bit`] mask per DoF.
    pub tags: Vec<u8>,
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
    pub v_space: Vec<usize>,
    /// DoFs on ∂D.
    pub cavity_boundary: Vec<usize>,
}

impl DofMap {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn local(&self, t: usize) -> &[usize] {
        &self.cells[t][..self.degree.local_dofs()]
    }

    pub fn has_tag(&self, dof: usize, tag: BoundaryTag) -> bool {
        self.tags[dof] & tag.bit() != 0
    }

    /// N_h = N_h⁰ + N_h^B.
    pub fn n_omega(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }
}

pub fn build_dofmap(mesh: &Mesh, degree: Degree, cavity_bc: CavityBc) -> Result<DofMap> {
    if !mesh.has_tag(BoundaryTag::DOmega) {
        return Err(Error::Fem("mesh has no edges tagged dOmega".into()));
    }
    if mesh.regions.iter().any(|r| r.in_cavity()) && !mesh.has_tag(BoundaryTag::DD) {
        return Err(Error::Fem("mesh has cavity triangles but no edges tagged dD".into()));
    }
    let nn = mesh.nodes.len();
    let mut coords = mesh.nodes.clone();
    let mut tags = mesh.node_tags();
    let mut cells = Vec::with_capacity(mesh.triangles.len());
    let edge_tag: HashMap<(usize, usize), u8> = {
        let mut m = HashMap::new();
        for (e, t) in mesh.edges.iter().zip(&mesh.edge_tags) {
            *m.entry(ordered(e[0], e[1])).or_insert(0) |= t.bit();
        }
        m
    };
    let mut edge_dof: HashMap<(usize, usize), usize> = HashMap::new();
    for tri in &mesh.triangles {
        let mut cell = [0usize; 6];
        cell[..3].copy_from_slice(tri);
        if degree == Degree::P2 {
            for (k, (a, b)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                let key = ordered(tri[a], tri[b]);
                let id = *edge_dof.entry(key).or_insert_with(|| {
                    let (p, q) = (mesh.nodes[key.0], mesh.nodes[key.1]);
                    coords.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                    tags.push(edge_tag.get(&key).copied().unwrap_or(0));
                    coords.len() - 1
                });
                cell[3 + k] = id;
            }
        }
        cells.push(cell);
    }
    debug_assert!(coords.len() >= nn);

    let n = coords.len();
    let nl = degree.local_dofs();
    let mut in_omega = vec![false; n];
    let mut in_shell = vec![false; n];
    for (t, cell) in cells.iter().enumerate() {
        let r = mesh.regions[t];
        for &d in &cell[..nl] {
            in_omega[d] |= r.in_omega();
            in_shell[d] |= r == Region::Shell;
        }
    }
    let on = |d: usize, tag: BoundaryTag| tags[d] & tag.bit() != 0;
    let interior: Vec<usize> = (0..n).filter(|&d| in_omega[d] && !on(d, BoundaryTag::DOmega)).collect();
    let boundary: Vec<usize> = (0..n).filter(|&d| in_omega[d] && on(d, BoundaryTag::DOmega)).collect();
    let cavity_boundary: Vec<usize> = (0..n).filter(|&d| on(d, BoundaryTag::DD)).collect();
    let v_space: Vec<usize> = (0..n)
        .filter(|&d| {
            in_shell[d]
                && !on(d, BoundaryTag::DOmega)
                && (cavity_bc == CavityBc::Neumann || !on(d, BoundaryTag::DD))
        })
        .collect();
    Ok(DofMap { degree, cavity_bc, coords, cells, tags, interior, boundary, v_space, cavity_boundary })
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
