use super::dofmap::DofMap;
use super::element::{element_matrices, LocalMatrices};
use crate::geometry::{Mesh, Region};
use crate::linalg::{CsrMatrix, Scalar};
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// coeff · ∫∇φ_i·∇φ_j
    Stiffness,
    /// coeff · ∫φ_iφ_j
    Mass,
}

/// Global matrix over all DoFs of `dofmap` summed from the triangles whose
/// region passes `filter`, with a per-region constant coefficient.
pub fn assemble(
    mesh: &Mesh,
    dofmap: &DofMap,
    form: Form,
    filter: impl Fn(Region) -> bool + Sync,
    coeff: impl Fn(Region) -> f64 + Sync,
) -> Result<CsrMatrix<f64>> {
    let deg = dofmap.degree;
    assemble_local(mesh, dofmap, filter, |t| {
        let r = mesh.regions[t];
        let c = coeff(r);
        let LocalMatrices { n, stiffness, mass } = element_matrices(mesh.vertices(t), deg, 1.0)?;
        let src = if form == Form::Stiffness { stiffness } else { mass };
        let mut out = Vec::with_capacity(n * n);
        for row in src.iter().take(n) {
            out.extend(row.iter().take(n).map(|v| c * v));
        }
        Ok(out)
    })
}

/// Generic element loop: `local(t)` returns the row-major local matrix of
/// triangle t. Local matrices are computed in parallel and accumulated in
/// triangle order, so the result does not depend on the thread count.
pub fn assemble_local<T: Scalar>(
    mesh: &Mesh,
    dofmap: &DofMap,
    filter: impl Fn(Region) -> bool + Sync,
    local: impl Fn(usize) -> Result<Vec<T>> + Sync + Send,
) -> Result<CsrMatrix<T>> {
    let selected: Vec<usize> = (0..mesh.triangles.len()).filter(|&t| filter(mesh.regions[t])).collect();
    if selected.is_empty() {
        return Err(Error::Fem("region filter selects no triangles".into()));
    }
    let locals = par::map(&selected, |&t| local(t));
    let nl = dofmap.degree.local_dofs();
    let mut trips = Vec::with_capacity(selected.len() * nl * nl);
    for (&t, lm) in selected.iter().zip(locals) {
        let lm = lm?;
        let dofs = dofmap.local(t);
        for a in 0..nl {
            for b in 0..nl {
                trips.push((dofs[a], dofs[b], lm[a * nl + b]));
            }
        }
    }
    let n = dofmap.len();
    Ok(CsrMatrix::from_triplets(n, n, &trips))
}
