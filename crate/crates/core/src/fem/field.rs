use super::dofmap::DofMap;
use super::element::{shape_functions, Affine};
use crate::geometry::{Locator, Mesh};
use crate::C64;

/// Point evaluation of finite element functions on a fixed mesh.
pub struct FieldEvaluator<'a> {
    mesh: &'a Mesh,
    dofmap: &'a DofMap,
    locator: Locator,
}

impl<'a> FieldEvaluator<'a> {
    pub fn new(mesh: &'a Mesh, dofmap: &'a DofMap) -> Self {
        FieldEvaluator { mesh, dofmap, locator: Locator::new(mesh) }
    }

    pub fn locator(&self) -> &Locator {
        &self.locator
    }

    /// Triangle and reference coordinates of x; points up to `slack` outside the
    /// mesh snap to the nearest triangle.
    pub fn reference_point(&self, x: [f64; 2], slack: f64) -> Option<(usize, [f64; 2])> {
        let hit = if slack > 0.0 {
            self.locator.locate_nearest(self.mesh, x, slack)
        } else {
            self.locator.locate(x)
        };
        hit.map(|(t, l)| (t, [l[1], l[2]]))
    }

    /// Value of the field with coefficients `u` at x.
    pub fn value(&self, u: &[C64], x: [f64; 2], slack: f64) -> Option<C64> {
        let (t, xi) = self.reference_point(x, slack)?;
        let (phi, _) = shape_functions(self.dofmap.degree, xi);
        Some(
            self.dofmap
                .local(t)
                .iter()
                .zip(phi)
                .fold(C64::new(0.0, 0.0), |s, (&d, p)| s + u[d] * p),
        )
    }

    /// Value and gradient at x.
    pub fn value_and_gradient(&self, u: &[C64], x: [f64; 2], slack: f64) -> Option<(C64, [C64; 2])> {
        let (t, xi) = self.reference_point(x, slack)?;
        let map = Affine::new(self.mesh.vertices(t)).ok()?;
        let (phi, g) = shape_functions(self.dofmap.degree, xi);
        let zero = C64::new(0.0, 0.0);
        let mut v = zero;
        let mut grad = [zero, zero];
        for (k, &d) in self.dofmap.local(t).iter().enumerate() {
            let gp = map.grad(g[k]);
            v += u[d] * phi[k];
            grad[0] += u[d] * gp[0];
            grad[1] += u[d] * gp[1];
        }
        Some((v, grad))
    }
}
