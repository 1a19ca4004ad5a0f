use crate::fem::{assemble, DofMap, Form};
use crate::geometry::{Mesh, Region};
use crate::linalg::CsrMatrix;
use crate::{CavityBc, Error, Result};

/// Unknown ordering [v₀, w₀, v_B]: global DoF indices of each block.
#[derive(Clone, Debug)]
pub struct BlockLayout {
    /// v-space DoFs (shell minus ∂Ω, and minus ∂D for Dirichlet).
    pub v: Vec<usize>,
    /// S_h⁰: Ω DoFs off ∂Ω.
    pub interior: Vec<usize>,
    /// S_h^B: DoFs on ∂Ω.
    pub boundary: Vec<usize>,
}

impl BlockLayout {
    pub fn dim(&self) -> usize {
        self.v.len() + self.interior.len() + self.boundary.len()
    }

    /// Offsets of the three blocks in the unknown vector.
    pub fn offsets(&self) -> [usize; 3] {
        [0, self.v.len(), self.v.len() + self.interior.len()]
    }

    /// Global DoF set of block `k` (0: v₀, 1: w₀, 2: v_B).
    pub fn block(&self, k: usize) -> &[usize] {
        match k {
            0 => &self.v,
            1 => &self.interior,
            _ => &self.boundary,
        }
    }
}

/// Block pencil 𝒜x = κ²ℬx of the cavity transmission problem.
#[derive(Clone, Debug)]
pub struct BlockSystem {
    pub a: CsrMatrix<f64>,
    pub b: CsrMatrix<f64>,
    pub layout: BlockLayout,
    pub n_c: f64,
    pub cavity_bc: CavityBc,
    /// Unweighted mass matrix over Ω on all DoFs, for normalising w_h.
    pub mass: CsrMatrix<f64>,
    pub n_dofs: usize,
}

impl BlockSystem {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }
}

/// Assembles
///
/// ```text
/// 𝒜 = [ S_D(V,V)   0         S_D(V,B)          ]
///     [ 0          S(I,I)    S(I,B)            ]
///     [ S_D(B,V)  −S(B,I)    S_D(B,B) − S(B,B) ]
/// ```
///
/// with S_D the stiffness over the shell and S over Ω; ℬ has the same layout
/// with M_nD (n_c-weighted shell mass) and M.
pub fn assemble_blocks(mesh: &Mesh, dofmap: &DofMap, n_c: f64) -> Result<BlockSystem> {
    if !(n_c > 0.0 && n_c.is_finite()) {
        return Err(Error::Fem(format!("n_c must be positive, got {n_c}")));
    }
    if dofmap.cells.len() != mesh.triangles.len() {
        return Err(Error::Fem(format!(
            "dofmap has {} cells but the mesh has {} triangles",
            dofmap.cells.len(),
            mesh.triangles.len()
        )));
    }
    if mesh.regions.iter().any(|&r| matches!(r, Region::Exterior | Region::Pml)) {
        return Err(Error::Fem("cavity eigenproblem needs a mesh of Ω only".into()));
    }
    let shell = |r: Region| r == Region::Shell;
    let omega = |r: Region| r.in_omega();
    let one = |_: Region| 1.0;
    let s_d = assemble(mesh, dofmap, Form::Stiffness, shell, one)?;
    let m_d = assemble(mesh, dofmap, Form::Mass, shell, |_| n_c)?;
    let s = assemble(mesh, dofmap, Form::Stiffness, omega, one)?;
    let m = assemble(mesh, dofmap, Form::Mass, omega, one)?;

    let layout = BlockLayout {
        v: dofmap.v_space.clone(),
        interior: dofmap.interior.clone(),
        boundary: dofmap.boundary.clone(),
    };
    let a = combine(&layout, dofmap.len(), &s_d, &s);
    let b = combine(&layout, dofmap.len(), &m_d, &m);
    log::debug!(
        "[ite] block pencil: |V|={} |I|={} |B|={} nnz(A)={} nnz(B)={}",
        layout.v.len(),
        layout.interior.len(),
        layout.boundary.len(),
        a.nnz(),
        b.nnz()
    );
    Ok(BlockSystem { a, b, layout, n_c, cavity_bc: dofmap.cavity_bc, mass: m, n_dofs: dofmap.len() })
}

/// Places the shell matrix `d` and the Ω matrix `o` into the 3×3 layout.
fn combine(layout: &BlockLayout, n: usize, d: &CsrMatrix<f64>, o: &CsrMatrix<f64>) -> CsrMatrix<f64> {
    const NONE: usize = usize::MAX;
    let off = layout.offsets();
    let index = |set: &[usize], base: usize| {
        let mut p = vec![NONE; n];
        for (k, &g) in set.iter().enumerate() {
            p[g] = base + k;
        }
        p
    };
    let pv = index(&layout.v, off[0]);
    let pi = index(&layout.interior, off[1]);
    let pb = index(&layout.boundary, off[2]);
    let mut trips = Vec::new();
    // Row block 1: shell operator against v₀ and v_B.
    for &g in &layout.v {
        for (e, x) in d.row(g) {
            let col = if pv[e] != NONE { pv[e] } else { pb[e] };
            if col != NONE {
                trips.push((pv[g], col, x));
            }
        }
    }
    // Row block 2: Ω operator against w₀ and v_B.
    for &g in &layout.interior {
        for (e, x) in o.row(g) {
            let col = if pi[e] != NONE { pi[e] } else { pb[e] };
            if col != NONE {
                trips.push((pi[g], col, x));
            }
        }
    }
    // Row block 3: shell minus Ω couplings.
    for &g in &layout.boundary {
        for (e, x) in d.row(g) {
            let col = if pv[e] != NONE { pv[e] } else { pb[e] };
            if col != NONE {
                trips.push((pb[g], col, x));
            }
        }
        for (e, x) in o.row(g) {
            let col = if pi[e] != NONE { pi[e] } else { pb[e] };
            if col != NONE {
                trips.push((pb[g], col, -x));
            }
        }
    }
    let dim = layout.dim();
    CsrMatrix::from_triplets(dim, dim, &trips)
}
