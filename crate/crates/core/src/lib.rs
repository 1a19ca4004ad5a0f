//! Numerical core for near-invisibility cloaking experiments in 2D.
//!
//! The pipeline is: mesh the nested geometry, compute interior transmission
//! eigenpairs of the cavity problem, fit a Herglotz incident wave to the
//! eigenfunction on a curve inside Ω, then solve the PML-truncated scattering
//! problem and measure the scattering ratio on the circle of radius 1.8.

// NaN-rejecting parameter checks are written as !(x > 0.0).
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fem;
pub mod geometry;
pub mod herglotz;
pub mod ite;
pub mod linalg;
pub mod oracles;
pub mod par;
pub mod scatter;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

use std::fmt;
use std::str::FromStr;

/// Boundary condition on the cavity boundary ∂D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CavityBc {
    Dirichlet,
    Neumann,
}

impl fmt::Display for CavityBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CavityBc::Dirichlet => "dirichlet",
            CavityBc::Neumann => "neumann",
        })
    }
}

impl FromStr for CavityBc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(CavityBc::Dirichlet),
            "neumann" | "n" => Ok(CavityBc::Neumann),
            _ => Err(Error::Domain(format!(
                "unknown cavity condition '{s}', expected dirichlet or neumann"
            ))),
        }
    }
}
