use super::blocks::BlockSystem;
use super::solve::EigenPair;
use crate::fem::DofMap;
use crate::{Error, Result, C64};

/// Nodal fields of an eigenpair over all DoFs of the dofmap. `v` vanishes
/// off the closed shell; `w` vanishes off Ω.
#[derive(Clone, Debug)]
pub struct Eigenfunctions {
    pub kappa: C64,
    pub v: Vec<C64>,
    pub w: Vec<C64>,
}

/// Scatters v_h = v₀ + v_B and w_h = w₀ + v_B to global DoFs, scaled so that
/// ‖w_h‖_{L²(Ω)} = 1 and the first non-negligible coefficient of w_h is real
/// and positive.
pub fn extract_eigenfunctions(pair: &EigenPair, system: &BlockSystem, dofmap: &DofMap) -> Result<Eigenfunctions> {
    let l = &system.layout;
    if dofmap.len() != system.n_dofs || pair.x.len() != l.dim() {
        return Err(Error::Eigen("eigenpair, block system and dofmap do not match".into()));
    }
    let zero = C64::new(0.0, 0.0);
    let mut v = vec![zero; system.n_dofs];
    let mut w = vec![zero; system.n_dofs];
    let off = l.offsets();
    for (k, &g) in l.v.iter().enumerate() {
        v[g] = pair.x[off[0] + k];
    }
    for (k, &g) in l.interior.iter().enumerate() {
        w[g] = pair.x[off[1] + k];
    }
    for (k, &g) in l.boundary.iter().enumerate() {
        v[g] = pair.x[off[2] + k];
        w[g] = pair.x[off[2] + k];
    }
    let mw = system.mass.matvec_c(&w);
    let nrm2 = w.iter().zip(&mw).fold(zero, |s, (a, b)| s + a.conj() * b).re;
    let wmax = w.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if !(nrm2 > 0.0) || wmax == 0.0 {
        return Err(Error::Eigen(format!("eigenpair κ={} has w_h = 0", pair.kappa)));
    }
    let lead = w.iter().find(|c| c.norm() > 1e-8 * wmax).copied().unwrap_or(C64::new(1.0, 0.0));
    let scale = (lead.conj() / lead.norm()) / nrm2.sqrt();
    v.iter_mut().for_each(|c| *c *= scale);
    w.iter_mut().for_each(|c| *c *= scale);
    Ok(Eigenfunctions { kappa: pair.kappa, v, w })
}

/// L²(Ω) norm of a nodal field with the system mass matrix.
pub fn l2_norm(system: &BlockSystem, u: &[C64]) -> f64 {
    let mu = system.mass.matvec_c(u);
    u.iter().zip(&mu).map(|(a, b)| (a.conj() * b).re).sum::<f64>().max(0.0).sqrt()
}
