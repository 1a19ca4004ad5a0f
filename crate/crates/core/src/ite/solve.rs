use faer::{c64, Mat};

use super::arnoldi::{arnoldi, norm, start_vector, ArnoldiConfig, Ritz};
use super::blocks::BlockSystem;
use crate::linalg::{CsrMatrix, SparseLu};
use crate::{CavityBc, Error, Result, C64};

/// Largest pencil handled by the dense QZ path.
pub const DENSE_MAX_DIM: usize = 2000;

/// Accepted pairs satisfy ‖𝒜x − λℬx‖₂/‖x‖₂ below this.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Shift used for the "smallest eigenvalues" selection.
pub const SMALLEST_SHIFT: f64 = 0.1;

/// Eigenvalues with |κ| or Re κ below this are skipped by the smallest
/// selection, and by the near selections for a Neumann cavity. The Neumann pencil has a many-dimensional kernel at λ = 0 and a
/// run of small negative λ (purely imaginary κ) that would otherwise lead the
/// ascending-Re κ order.
pub const SPURIOUS_FLOOR: f64 = 0.05;

/// Interior transmission eigenpair; the unknown vector is [v₀, w₀, v_B].
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub kappa: C64,
    pub lambda: C64,
    pub x: Vec<C64>,
    /// [v₀, v_B] over the v-space and ∂Ω blocks.
    pub v_coeffs: Vec<C64>,
    /// [w₀, v_B] over S_h⁰ and S_h^B.
    pub w_coeffs: Vec<C64>,
    pub residual: f64,
}

impl EigenPair {
    fn new(sys: &BlockSystem, lambda: C64, mut x: Vec<C64>) -> Self {
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let residual = residual(sys, lambda, &x);
        let [_, oi, ob] = sys.layout.offsets();
        let v_coeffs = x[..oi].iter().chain(&x[ob..]).copied().collect();
        let w_coeffs = x[oi..].to_vec();
        EigenPair { kappa: kappa_of(lambda), lambda, x, v_coeffs, w_coeffs, residual }
    }

    pub fn is_complex(&self) -> bool {
        self.lambda.im.abs() > 1e-6 * self.lambda.norm()
    }
}

/// Principal square root, so Re κ ≥ 0.
pub fn kappa_of(lambda: C64) -> C64 {
    let k = lambda.sqrt();
    if k.re < 0.0 {
        -k
    } else {
        k
    }
}

/// ‖𝒜x − λℬx‖₂/‖x‖₂.
pub fn residual(sys: &BlockSystem, lambda: C64, x: &[C64]) -> f64 {
    let ax = sys.a.matvec_c(x);
    let bx = sys.b.matvec_c(x);
    let r: f64 = ax.iter().zip(&bx).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
    r / norm(x)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Target {
    /// Nearest λ to the shift.
    Near,
    /// Nearest non-real λ to the shift.
    ComplexNear,
    /// Smallest Re κ among non-spurious values.
    Smallest,
}

/// `count` eigenpairs with κ² nearest `shift`², sorted by |λ − shift²|. A
/// complex pair cut by `count` is completed with its conjugate.
pub fn solve_near(sys: &BlockSystem, shift: C64, count: usize) -> Result<Vec<EigenPair>> {
    shift_invert(sys, shift * shift, count, Target::Near)
}

/// `count` non-real eigenvalues nearest `shift`², as conjugate pairs.
pub fn solve_complex_near(sys: &BlockSystem, shift: C64, count: usize) -> Result<Vec<EigenPair>> {
    shift_invert(sys, shift * shift, count, Target::ComplexNear)
}

/// `count` eigenpairs of smallest Re κ, skipping the spurious modes near zero.
pub fn solve_smallest(sys: &BlockSystem, count: usize) -> Result<Vec<EigenPair>> {
    shift_invert(sys, C64::new(SMALLEST_SHIFT * SMALLEST_SHIFT, 0.0), count, Target::Smallest)
}

fn accept(target: Target, lambda: C64, bc: CavityBc) -> bool {
    let k = kappa_of(lambda);
    let genuine = k.norm() >= SPURIOUS_FLOOR && k.re >= SPURIOUS_FLOOR;
    match target {
        // Only the Neumann pencil has the spurious cluster at λ = 0.
        Target::Near => bc == CavityBc::Dirichlet || genuine,
        Target::ComplexNear => lambda.im.abs() > 1e-6 * lambda.norm(),
        Target::Smallest => genuine,
    }
}

/// Number of accepted values that must converge before the final selection.
fn required(target: Target, count: usize) -> usize {
    match target {
        Target::Near | Target::ComplexNear => count + 1,
        Target::Smallest => 2 * count + 6,
    }
}

fn shift_invert(sys: &BlockSystem, sigma: C64, count: usize, target: Target) -> Result<Vec<EigenPair>> {
    if count == 0 {
        return Err(Error::Eigen("count must be at least 1".into()));
    }
    let (sigma, lu) = factor_shifted(sys, sigma)?;
    let op = |x: &[C64]| lu.solve(&sys.b.matvec_c(x));
    let need = required(target, count).min(sys.dim());
    let cfg = ArnoldiConfig::for_count(need);
    let lambda_of = |r: &Ritz| sigma + r.mu.inv();
    let wanted = |ritz: &[Ritz]| -> Vec<usize> {
        (0..ritz.len())
            .filter(|&i| ritz[i].mu.norm() > 0.0 && accept(target, lambda_of(&ritz[i]), sys.cavity_bc))
            .take(need)
            .collect()
    };
    let kry = arnoldi(op, &start_vector(sys.dim()), cfg, |ritz| {
        let w = wanted(ritz);
        w.len() >= need.min(count) && w.iter().all(|&i| ritz[i].estimate <= cfg.tol)
    })?;
    let idx = wanted(&kry.ritz);
    let conv: Vec<usize> = idx.iter().copied().filter(|&i| kry.ritz[i].estimate <= cfg.tol).collect();
    if !kry.converged || conv.len() < count {
        return Err(Error::Eigen(format!(
            "Arnoldi did not converge: {} of {} wanted Ritz values within tolerance at dimension {}",
            conv.len(),
            need,
            kry.basis.len()
        )));
    }
    let cands: Vec<(C64, usize)> = conv.iter().map(|&i| (lambda_of(&kry.ritz[i]), i)).collect();
    let chosen = select(target, sigma, &cands, count);
    let pairs = chosen
        .into_iter()
        .map(|(lambda, i)| {
            let x = kry.lift(&kry.ritz[i].y);
            polish(sys, EigenPair::new(sys, lambda, x))
        })
        .collect::<Result<Vec<_>>>()?;
    log::info!(
        "[ite] shift-invert at λ={:.6}{:+.6}i: {} pairs, Krylov dimension {}",
        sigma.re,
        sigma.im,
        pairs.len(),
        kry.basis.len()
    );
    Ok(pairs)
}

/// Factors 𝒜 − σℬ, nudging σ off an exact eigenvalue if needed.
fn factor_shifted(sys: &BlockSystem, sigma: C64) -> Result<(C64, SparseLu)> {
    let mut s = sigma;
    for attempt in 0..4 {
        match SparseLu::new(&shifted(sys, s)) {
            Ok(lu) => return Ok((s, lu)),
            Err(Error::Singular(msg)) => {
                let bump = 1e-6 * (attempt + 1) as f64 * sigma.norm().max(1.0);
                log::warn!("[ite] 𝒜 − σℬ singular at σ={s} ({msg}); perturbing shift by {bump:.1e}");
                s = sigma + C64::new(bump, 0.0);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Singular(format!("𝒜 − σℬ singular near σ={sigma}")))
}

fn shifted(sys: &BlockSystem, sigma: C64) -> CsrMatrix<C64> {
    sys.a.map(|v| C64::new(v, 0.0)).add_scaled(&sys.b.map(|v| C64::new(v, 0.0)), -sigma)
}

/// Final ordering and conjugate completion of converged candidates.
fn select(target: Target, sigma: C64, cands: &[(C64, usize)], count: usize) -> Vec<(C64, usize)> {
    let mut c = cands.to_vec();
    match target {
        Target::Near | Target::ComplexNear => {
            c.sort_by(|a, b| (a.0 - sigma).norm().total_cmp(&(b.0 - sigma).norm()).then(a.0.im.total_cmp(&b.0.im)))
        }
        Target::Smallest => c.sort_by(|a, b| {
            kappa_of(a.0).re.total_cmp(&kappa_of(b.0).re).then(a.0.im.total_cmp(&b.0.im))
        }),
    }
    // Conjugates tie in distance; list the one with negative imaginary part first.
    for i in 1..c.len() {
        let (a, b) = (c[i - 1].0, c[i].0);
        if a.im > b.im && (a - b.conj()).norm() <= 1e-8 * a.norm() {
            c.swap(i - 1, i);
        }
    }
    let count = count.min(c.len());
    let mut out: Vec<(C64, usize)> = c.iter().take(count).copied().collect();
    if sigma.im == 0.0 && count > 0 {
        let last = out[out.len() - 1].0;
        if last.im.abs() > 1e-6 * last.norm() {
            let partner = c[count..]
                .iter()
                .filter(|p| (p.0 - last.conj()).norm() <= 1e-6 * last.norm())
                .min_by(|a, b| (a.0 - last.conj()).norm().total_cmp(&(b.0 - last.conj()).norm()));
            let has = out[..out.len() - 1].iter().any(|p| (p.0 - last.conj()).norm() <= 1e-6 * last.norm());
            if let (Some(&p), false) = (partner, has) {
                out.push(p);
            }
        }
    }
    out
}

/// Inverse iteration at the computed λ when the Ritz vector misses the
/// residual tolerance.
fn polish(sys: &BlockSystem, pair: EigenPair) -> Result<EigenPair> {
    if pair.residual <= RESIDUAL_TOL {
        return Ok(pair);
    }
    let mut best = pair;
    for _ in 0..3 {
        let sigma = best.lambda * C64::new(1.0 + 1e-10, 0.0);
        let (_, lu) = factor_shifted(sys, sigma)?;
        let x = lu.solve(&sys.b.matvec_c(&best.x));
        let ax = sys.a.matvec_c(&x);
        let bx = sys.b.matvec_c(&x);
        let num = x.iter().zip(&ax).fold(C64::new(0.0, 0.0), |s, (u, v)| s + u.conj() * v);
        let den = x.iter().zip(&bx).fold(C64::new(0.0, 0.0), |s, (u, v)| s + u.conj() * v);
        let next = EigenPair::new(sys, num / den, x);
        log::debug!("[ite] polish κ={:.8}: residual {:.2e} -> {:.2e}", next.kappa, best.residual, next.residual);
        if next.residual >= best.residual {
            break;
        }
        best = next;
        if best.residual <= RESIDUAL_TOL {
            break;
        }
    }
    Ok(best)
}

/// Dense QZ on the full pencil; reference path for small systems.
pub fn solve_dense(sys: &BlockSystem, shift: C64, count: usize) -> Result<Vec<EigenPair>> {
    let n = sys.dim();
    if n > DENSE_MAX_DIM {
        return Err(Error::Eigen(format!("dense solver limited to dimension {DENSE_MAX_DIM}, got {n}")));
    }
    if count == 0 {
        return Err(Error::Eigen("count must be at least 1".into()));
    }
    // The complex QZ path is used even though the pencil is real: faer's real
    // QZ overflows an index on some of these pencils.
    let dense = |m: &CsrMatrix<f64>| {
        let mut d = Mat::<c64>::zeros(n, n);
        for (i, j, v) in m.triplets() {
            d[(i, j)] = c64::new(v, 0.0);
        }
        d
    };
    let (a, b) = (dense(&sys.a), dense(&sys.b));
    let gevd = a.generalized_eigen(&b).map_err(|e| Error::Eigen(format!("QZ failed: {e:?}")))?;
    let (sa, sb) = (gevd.S_a().column_vector(), gevd.S_b().column_vector());
    let u = gevd.U();
    let sigma = shift * shift;
    let mut cands = Vec::new();
    for i in 0..n {
        let (al, be) = (C64::new(sa[i].re, sa[i].im), C64::new(sb[i].re, sb[i].im));
        if be.norm() <= 1e-12 * al.norm() {
            continue;
        }
        if accept(Target::Near, al / be, sys.cavity_bc) {
            cands.push((al / be, i));
        }
    }
    let chosen = select(Target::Near, C64::new(sigma.re, sigma.im), &cands, count.min(cands.len()));
    chosen
        .into_iter()
        .map(|(lambda, i)| {
            let x: Vec<C64> = (0..n).map(|r| C64::new(u[(r, i)].re, u[(r, i)].im)).collect();
            polish(sys, EigenPair::new(sys, lambda, x))
        })
        .collect()
}
