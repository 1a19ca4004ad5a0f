//! Separated-variable transmission eigenvalues for a disc cavity inside a disc.
//!
//! With w = J_m(κr)e^{imθ} and v = (aJ_m(κ√n r) + bY_m(κ√n r))e^{imθ} in the
//! shell, the cavity condition at r_D and the Cauchy matching at r_Ω give a
//! 3×3 linear system in (a, b, c); κ is an eigenvalue iff its determinant
//! vanishes.

use crate::oracles::bessel::{bessel_j_all, bessel_y_all};
use crate::{par, CavityBc, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialProblem {
    pub n_c: f64,
    pub r_d: f64,
    pub r_omega: f64,
    pub cavity_bc: CavityBc,
    pub m: u32,
}

impl RadialProblem {
    /// Ω the unit disc, D the disc of radius 0.5, n_c = 16.
    pub fn unit(cavity_bc: CavityBc, m: u32) -> Self {
        RadialProblem { n_c: 16.0, r_d: 0.5, r_omega: 1.0, cavity_bc, m }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_c > 0.0) {
            return Err(Error::Domain(format!("n_c must be positive, got {}", self.n_c)));
        }
        if !(self.r_d > 0.0 && self.r_d < self.r_omega) {
            return Err(Error::Domain(format!(
                "radii must satisfy 0 < r_D < r_Ω, got {} and {}",
                self.r_d, self.r_omega
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialRoot {
    pub m: u32,
    pub kappa: f64,
    /// Angular multiplicity: 1 for m = 0, 2 for the cos/sin pair when m ≥ 1.
    pub degeneracy: u32,
}

/// J, J′ of order m at x.
fn jy(m: usize, x: f64) -> ([f64; 2], [f64; 2]) {
    let j = bessel_j_all(m + 1, x);
    let y = bessel_y_all(m + 1, x);
    let d = |z: &[f64]| if m == 0 { -z[1] } else { 0.5 * (z[m - 1] - z[m + 1]) };
    ([j[m], d(&j)], [y[m], d(&y)])
}

/// Rows: cavity condition at r_D, value match and flux match at r_Ω.
pub fn radial_matching_matrix(kappa: f64, prob: &RadialProblem) -> [[f64; 3]; 3] {
    let m = prob.m as usize;
    let s = prob.n_c.sqrt();
    let ks = kappa * s;
    let (jd, yd) = jy(m, ks * prob.r_d);
    let (jo, yo) = jy(m, ks * prob.r_omega);
    let (wo, _) = jy(m, kappa * prob.r_omega);
    let row1 = match prob.cavity_bc {
        CavityBc::Dirichlet => [jd[0], yd[0], 0.0],
        CavityBc::Neumann => [jd[1], yd[1], 0.0],
    };
    [
        row1,
        [jo[0], yo[0], -wo[0]],
        [ks * jo[1], ks * yo[1], -kappa * wo[1]],
    ]
}

pub fn radial_ite_determinant(kappa: f64, prob: &RadialProblem) -> f64 {
    det3(&radial_matching_matrix(kappa, prob))
}

pub(crate) fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

const SCAN_STEP: f64 = 1e-3;
const ROOT_TOL: f64 = 1e-9;

/// All sign changes of the determinant on [lo, hi] for m = 0..=m_max, refined by
/// bisection. `template.m` is ignored. Sorted ascending in κ.
pub fn radial_ite_roots(
    lo: f64,
    hi: f64,
    m_max: u32,
    template: &RadialProblem,
) -> Result<Vec<RadialRoot>> {
    template.validate()?;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::Domain(format!("empty or invalid interval [{lo}, {hi}]")));
    }
    let orders: Vec<u32> = (0..=m_max).collect();
    let per_m = par::map(&orders, |&m| {
        let prob = RadialProblem { m, ..*template };
        let f = |k: f64| radial_ite_determinant(k, &prob);
        let steps = ((hi - lo) / SCAN_STEP).ceil() as usize;
        let mut out = Vec::new();
        let mut a = lo;
        let mut fa = f(a);
        for i in 1..=steps {
            let b = (lo + i as f64 * SCAN_STEP).min(hi);
            let fb = f(b);
            if fa == 0.0 {
                out.push(a);
            } else if fa.signum() != fb.signum() && fb != 0.0 {
                out.push(bisect(&f, a, b, fa));
            }
            a = b;
            fa = fb;
        }
        if fa == 0.0 {
            out.push(a);
        }
        out.into_iter()
            .map(|kappa| RadialRoot { m, kappa, degeneracy: if m == 0 { 1 } else { 2 } })
            .collect::<Vec<_>>()
    });
    let mut roots: Vec<RadialRoot> = per_m.into_iter().flatten().collect();
    roots.sort_by(|a, b| a.kappa.total_cmp(&b.kappa).then(a.m.cmp(&b.m)));
    Ok(roots)
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > ROOT_TOL {
        let c = 0.5 * (a + b);
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    0.5 * (a + b)
}
