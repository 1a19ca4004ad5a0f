//! Nested geometries Σ ⊂ D ⊂ Ω ⊂ box, their triangulation and point location.

mod io;
mod locate;
mod mesh;
mod mesher;
mod shape;

pub use io::{export_mesh, import_mesh, read_mesh, write_mesh};
pub use locate::{locate_point, Locator};
pub use mesh::{BoundaryTag, Mesh, Region};
pub use mesher::generate_mesh;
pub use shape::Shape;

use crate::{Error, Result};

/// Radius of the circle Γ on which the scattering ratio is measured.
pub const GAMMA_RADIUS: f64 = 1.8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometrySpec {
    /// Ω.
    pub outer: Shape,
    /// D.
    pub cavity: Shape,
    /// Σ, present only for the three-layer configuration.
    pub core: Option<Shape>,
    /// Half-width L of the physical box.
    pub box_halfwidth: f64,
    /// PML thickness d.
    pub pml_thickness: f64,
}

impl GeometrySpec {
    pub const DEFAULT_BOX: f64 = 2.2;
    pub const DEFAULT_PML: f64 = 0.6;

    pub fn new(outer: Shape, cavity: Shape) -> Self {
        GeometrySpec {
            outer,
            cavity,
            core: None,
            box_halfwidth: Self::DEFAULT_BOX,
            pml_thickness: Self::DEFAULT_PML,
        }
    }

    /// Unit disc with a cavity of radius 0.5.
    pub fn circle() -> Self {
        Self::new(Shape::Circle { r: 1.0 }, Shape::Circle { r: 0.5 })
    }

    /// Ellipse (1, 1.2) with cavity (0.5, 0.6).
    pub fn ellipse() -> Self {
        Self::new(Shape::Ellipse { a: 1.0, b: 1.2 }, Shape::Ellipse { a: 0.5, b: 0.6 })
    }

    /// Square of half-width 1 with cavity of half-width 0.5.
    pub fn square() -> Self {
        Self::new(Shape::Square { half: 1.0 }, Shape::Square { half: 0.5 })
    }

    pub fn with_core(mut self, core: Shape) -> Self {
        self.core = Some(core);
        self
    }

    /// Default core of the three-layer configuration: r = 0.3 for a circular
    /// cavity, semi-axes (0.3, 0.36) for an elliptic one, half-width 0.3 otherwise.
    pub fn default_core(&self) -> Shape {
        match self.cavity {
            Shape::Circle { .. } => Shape::Circle { r: 0.3 },
            Shape::Ellipse { .. } => Shape::Ellipse { a: 0.3, b: 0.36 },
            Shape::Square { .. } => Shape::Square { half: 0.3 },
        }
    }

    /// The shapes from innermost to outermost.
    pub fn curves(&self) -> Vec<Shape> {
        let mut v: Vec<Shape> = self.core.into_iter().collect();
        v.push(self.cavity);
        v.push(self.outer);
        v
    }

    pub fn validate(&self) -> Result<()> {
        for s in self.curves() {
            s.validate()?;
        }
        if !(self.box_halfwidth > 0.0 && self.pml_thickness > 0.0) {
            return Err(Error::Geometry("box half-width and PML thickness must be positive".into()));
        }
        let curves = self.curves();
        for w in curves.windows(2) {
            if clearance(&w[1], &w[0]) <= 0.0 {
                return Err(Error::Geometry(format!("{} is not strictly inside {}", w[0], w[1])));
            }
        }
        let boxed = Shape::Square { half: self.box_halfwidth };
        if clearance(&boxed, &self.outer) <= 0.0 {
            return Err(Error::Geometry(format!("{} does not fit in the physical box", self.outer)));
        }
        Ok(())
    }

    /// Also requires Γ to sit between Ω and the physical box.
    pub fn validate_for_scattering(&self) -> Result<()> {
        self.validate()?;
        if !(self.outer.circumradius() < GAMMA_RADIUS && GAMMA_RADIUS < self.box_halfwidth) {
            return Err(Error::Geometry(format!(
                "Γ of radius {GAMMA_RADIUS} must lie between Ω (circumradius {}) and the box half-width {}",
                self.outer.circumradius(),
                self.box_halfwidth
            )));
        }
        Ok(())
    }

    /// Smallest gap between consecutive nested curves.
    pub fn min_clearance(&self) -> f64 {
        self.curves()
            .windows(2)
            .map(|w| clearance(&w[1], &w[0]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Signed clearance of `inner` inside `outer`, estimated on a fine sample of
/// `inner`'s boundary; positive iff inner ⊂ outer strictly.
fn clearance(outer: &Shape, inner: &Shape) -> f64 {
    let n = 2048;
    (0..n)
        .map(|i| {
            let p = inner.point_at(i as f64 / n as f64);
            let d = outer.distance(p);
            if outer.contains(p) {
                d
            } else {
                -d
            }
        })
        .fold(f64::INFINITY, f64::min)
}
