use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Lagrange element degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Degree {
    P1,
    P2,
}

impl Degree {
    pub fn local_dofs(self) -> usize {
        match self {
            Degree::P1 => 3,
            Degree::P2 => 6,
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Degree::P1 => 1,
            Degree::P2 => 2,
        }
    }

    pub fn from_order(p: u32) -> Result<Degree> {
        match p {
            1 => Ok(Degree::P1),
            2 => Ok(Degree::P2),
            _ => Err(Error::Fem(format!("unsupported element degree {p}, expected 1 or 2"))),
        }
    }

    /// Symmetric rule exact for polynomials of degree 2p.
    pub fn rule(self) -> &'static QuadRule {
        match self {
            Degree::P1 => &RULE3,
            Degree::P2 => &RULE6,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.order())
    }
}

impl FromStr for Degree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p: u32 = s.trim().trim_start_matches(['p', 'P']).parse().map_err(|_| Error::Fem(format!("bad degree '{s}'")))?;
        Degree::from_order(p)
    }
}

/// Quadrature on the reference triangle (0,0), (1,0), (0,1); weights sum to ½.
pub struct QuadRule {
    pub points: &'static [[f64; 2]],
    pub weights: &'static [f64],
}

static RULE3: QuadRule = QuadRule {
    points: &[[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]],
    weights: &[1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0],
};

const A1: f64 = 0.445_948_490_915_965;
const B1: f64 = 0.108_103_018_168_070;
const W1: f64 = 0.223_381_589_678_011 / 2.0;
const A2: f64 = 0.091_576_213_509_771;
const B2: f64 = 0.816_847_572_980_459;
const W2: f64 = 0.109_951_743_655_322 / 2.0;

static RULE6: QuadRule = QuadRule {
    points: &[[A1, A1], [A1, B1], [B1, A1], [A2, A2], [A2, B2], [B2, A2]],
    weights: &[W1, W1, W1, W2, W2, W2],
};

/// Shape function values and reference gradients at reference point ξ.
/// P2 ordering: vertices 0, 1, 2 then edge midpoints (0,1), (1,2), (2,0).
pub fn shape_functions(deg: Degree, xi: [f64; 2]) -> ([f64; 6], [[f64; 2]; 6]) {
    let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut n = [0.0; 6];
    let mut g = [[0.0; 2]; 6];
    match deg {
        Degree::P1 => {
            n[..3].copy_from_slice(&l);
            g[..3].copy_from_slice(&dl);
        }
        Degree::P2 => {
            for a in 0..3 {
                n[a] = l[a] * (2.0 * l[a] - 1.0);
                g[a] = [(4.0 * l[a] - 1.0) * dl[a][0], (4.0 * l[a] - 1.0) * dl[a][1]];
            }
            for (k, (a, b)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                n[3 + k] = 4.0 * l[a] * l[b];
                g[3 + k] = [
                    4.0 * (l[a] * dl[b][0] + l[b] * dl[a][0]),
                    4.0 * (l[a] * dl[b][1] + l[b] * dl[a][1]),
                ];
            }
        }
    }
    (n, g)
}

/// Affine map from the reference triangle.
#[derive(Clone, Copy, Debug)]
pub struct Affine {
    pub origin: [f64; 2],
    /// Columns are the edge vectors v1 − v0 and v2 − v0.
    pub jac: [[f64; 2]; 2],
    /// Inverse Jacobian; physical gradient = invᵀ · reference gradient.
    pub inv: [[f64; 2]; 2],
    pub det: f64,
}

impl Affine {
    pub fn new(v: [[f64; 2]; 3]) -> Result<Affine> {
        let jac = [[v[1][0] - v[0][0], v[2][0] - v[0][0]], [v[1][1] - v[0][1], v[2][1] - v[0][1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = (jac[0][0].abs() + jac[1][0].abs()) * (jac[0][1].abs() + jac[1][1].abs());
        if !(det.abs() > 1e-14 * scale) {
            return Err(Error::Fem("degenerate (zero-area) triangle".into()));
        }
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        Ok(Affine { origin: v[0], jac, inv, det })
    }

    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv[0][0] * g[0] + self.inv[1][0] * g[1],
            self.inv[0][1] * g[0] + self.inv[1][1] * g[1],
        ]
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }
}

/// Local stiffness ∫∇φ_a·∇φ_b and mass coeff·∫φ_aφ_b; the coefficient scales
/// the mass only.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMatrices {
    pub n: usize,
    pub stiffness: [[f64; 6]; 6],
    pub mass: [[f64; 6]; 6],
}

pub fn element_matrices(v: [[f64; 2]; 3], deg: Degree, coeff: f64) -> Result<LocalMatrices> {
    let map = Affine::new(v)?;
    let n = deg.local_dofs();
    let mut k = [[0.0; 6]; 6];
    let mut m = [[0.0; 6]; 6];
    match deg {
        Degree::P1 => {
            let (_, g) = shape_functions(deg, [0.0, 0.0]);
            let gp: Vec<[f64; 2]> = g[..3].iter().map(|&gr| map.grad(gr)).collect();
            let area = map.area();
            for a in 0..3 {
                for b in 0..3 {
                    k[a][b] = area * (gp[a][0] * gp[b][0] + gp[a][1] * gp[b][1]);
                    m[a][b] = coeff * area / 12.0 * if a == b { 2.0 } else { 1.0 };
                }
            }
        }
        Degree::P2 => {
            let rule = deg.rule();
            let jdet = map.det.abs();
            for (xi, &w) in rule.points.iter().zip(rule.weights) {
                let (phi, g) = shape_functions(deg, *xi);
                let gp: [[f64; 2]; 6] = g.map(|gr| map.grad(gr));
                let wj = w * jdet;
                for a in 0..n {
                    for b in 0..n {
                        k[a][b] += wj * (gp[a][0] * gp[b][0] + gp[a][1] * gp[b][1]);
                        m[a][b] += wj * phi[a] * phi[b];
                    }
                }
            }
            for row in m.iter_mut().take(n) {
                for v in row.iter_mut().take(n) {
                    *v *= coeff;
                }
            }
        }
    }
    Ok(LocalMatrices { n, stiffness: k, mass: m })
}
