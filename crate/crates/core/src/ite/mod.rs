//! Interior transmission eigenproblem of the cavity: block pencil assembly
//! and shift-invert eigensolvers.

mod arnoldi;
mod blocks;
mod eigenfunction;
mod report;
mod solve;

pub use arnoldi::{arnoldi, start_vector, ArnoldiConfig, Krylov, Ritz};
pub use blocks::{assemble_blocks, BlockLayout, BlockSystem};
pub use eigenfunction::{extract_eigenfunctions, l2_norm, Eigenfunctions};
pub use report::{write_eigenvalues_csv, write_field_csv};
pub use solve::{
    kappa_of, residual, solve_complex_near, solve_dense, solve_near, solve_smallest, EigenPair, DENSE_MAX_DIM,
    RESIDUAL_TOL, SMALLEST_SHIFT, SPURIOUS_FLOOR,
};
