//! Semi-analytic reference solutions: Bessel functions, the separated-variable
//! transmission eigenvalue determinant for concentric discs, and Mie series.

mod bessel;
mod mie;
mod radial;

pub use bessel::{
    bessel, bessel_j, bessel_j_all, bessel_jp, bessel_y, bessel_y_all, bessel_yp, hankel1_all,
    BesselKind,
};
pub use mie::{mie_order, mie_scatter, mie_scatter_with_order, MieKind};
pub use radial::{
    radial_ite_determinant, radial_ite_roots, radial_matching_matrix, RadialProblem, RadialRoot,
};
