//! Lagrange P1/P2 finite elements on tagged triangulations.

mod assembly;
mod dofmap;
mod element;
mod field;

pub use assembly::{assemble, assemble_local, Form};
pub use dofmap::{build_dofmap, DofMap};
pub use element::{element_matrices, shape_functions, Affine, Degree, LocalMatrices, QuadRule};
pub use field::FieldEvaluator;
