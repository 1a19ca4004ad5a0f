//! PML-truncated scattering by the cloaked configuration and the scattering
//! ratio on Γ.

mod assemble;
mod export;
mod medium;
mod pml;
mod solve;

pub use assemble::{assemble_scatter, ScatterProblem, ScatterSystem};
pub use export::{export_fields, write_ratio_report, GridSpec, RatioRow};
pub use medium::{Coefficients, LossyParams, MediumMode, MediumSpec, SHELL_INDEX};
pub use pml::{pml_stretch, PmlConfig};
pub use solve::{
    flux_on_gamma, gamma_points, sample_on_gamma, scatter, scattering_ratio, solve_scatter, ScatterSolution,
    ALGEBRAIC_TOL, GAMMA_POINTS,
};
