use faer::{c64, Mat};

use crate::{Error, Result, C64};

/// Krylov parameters for the shift-invert operator.
#[derive(Clone, Copy, Debug)]
pub struct ArnoldiConfig {
    /// Dimension at which Ritz values are first inspected.
    pub min_dim: usize,
    /// Hard cap on the Krylov dimension.
    pub max_dim: usize,
    /// Ritz values are inspected every this many steps beyond `min_dim`.
    pub check_every: usize,
    /// Relative Ritz residual |h_{k+1,k} y_k| / |μ| for convergence.
    pub tol: f64,
}

impl ArnoldiConfig {
    pub fn for_count(count: usize) -> Self {
        ArnoldiConfig { min_dim: (4 * count).max(40), max_dim: 300, check_every: 10, tol: 1e-10 }
    }
}

/// Ritz pair of the operator: eigenvalue μ, coordinates in the Krylov basis
/// and relative residual estimate.
#[derive(Clone, Debug)]
pub struct Ritz {
    pub mu: C64,
    pub y: Vec<C64>,
    pub estimate: f64,
}

/// Orthonormal Krylov basis with the Ritz pairs from the last inspection.
pub struct Krylov {
    pub basis: Vec<Vec<C64>>,
    pub ritz: Vec<Ritz>,
    pub converged: bool,
}

impl Krylov {
    /// Lifts Ritz coordinates to a vector of the full space.
    pub fn lift(&self, y: &[C64]) -> Vec<C64> {
        let n = self.basis[0].len();
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (v, &c) in self.basis.iter().zip(y) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += c * vi;
            }
        }
        x
    }
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(C64::new(0.0, 0.0), |s, (x, y)| s + x.conj() * y)
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Arnoldi iteration with two-pass classical Gram-Schmidt. `done` receives the
/// Ritz pairs sorted by decreasing |μ| at every inspection and stops the
/// iteration by returning true.
pub fn arnoldi(
    op: impl Fn(&[C64]) -> Vec<C64>,
    start: &[C64],
    cfg: ArnoldiConfig,
    mut done: impl FnMut(&[Ritz]) -> bool,
) -> Result<Krylov> {
    let n = start.len();
    let max_dim = cfg.max_dim.min(n);
    let s = norm(start);
    if s == 0.0 {
        return Err(Error::Eigen("zero starting vector".into()));
    }
    let mut basis = vec![start.iter().map(|v| v / s).collect::<Vec<_>>()];
    // Column j of H holds the Gram-Schmidt coefficients of step j.
    let mut h: Vec<Vec<C64>> = Vec::new();
    loop {
        let j = basis.len() - 1;
        let mut w = op(&basis[j]);
        let mut col = vec![C64::new(0.0, 0.0); j + 2];
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                col[i] += c;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= c * vk;
                }
            }
        }
        let beta = norm(&w);
        col[j + 1] = C64::new(beta, 0.0);
        h.push(col);
        let k = j + 1;
        let scale = h.iter().flat_map(|c| c.iter()).fold(0.0f64, |m, v| m.max(v.norm()));
        let breakdown = beta <= 1e-14 * scale;
        let at_check = k >= cfg.min_dim.min(max_dim) && ((k - cfg.min_dim.min(max_dim)) % cfg.check_every == 0);
        if at_check || breakdown || k == max_dim {
            let ritz = ritz_pairs(&h, k)?;
            if done(&ritz) {
                return Ok(Krylov { basis: truncate(basis, k), ritz, converged: true });
            }
            if breakdown || k == max_dim {
                return Ok(Krylov { basis: truncate(basis, k), ritz, converged: false });
            }
        }
        basis.push(w.iter().map(|v| v / beta).collect());
    }
}

fn truncate(mut basis: Vec<Vec<C64>>, k: usize) -> Vec<Vec<C64>> {
    basis.truncate(k);
    basis
}

fn ritz_pairs(h: &[Vec<C64>], k: usize) -> Result<Vec<Ritz>> {
    let hk = Mat::<c64>::from_fn(k, k, |i, j| {
        let v = h[j].get(i).copied().unwrap_or_default();
        c64::new(v.re, v.im)
    });
    let beta = h[k - 1][k].re;
    let evd = hk.eigen().map_err(|e| Error::Eigen(format!("Hessenberg eigensolver failed: {e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let mut out: Vec<Ritz> = (0..k)
        .map(|i| {
            let mu = C64::new(s[i].re, s[i].im);
            let mut y: Vec<C64> = (0..k).map(|r| C64::new(u[(r, i)].re, u[(r, i)].im)).collect();
            let ny = norm(&y);
            y.iter_mut().for_each(|v| *v /= ny);
            let estimate = beta * y[k - 1].norm() / mu.norm().max(f64::MIN_POSITIVE);
            Ritz { mu, y, estimate }
        })
        .collect();
    out.sort_by(|a, b| b.mu.norm().total_cmp(&a.mu.norm()));
    Ok(out)
}

/// Deterministic real starting vector with entries in [−1, 1].
pub fn start_vector(n: usize) -> Vec<C64> {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    (0..n)
        .map(|_| {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            C64::new(((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0, 0.0)
        })
        .collect()
}
