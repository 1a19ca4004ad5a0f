use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use super::CsrMatrix;
use crate::{Error, Result, C64};

/// Sparse LU factorisation of a complex square matrix (faer backend).
pub struct SparseLu {
    n: usize,
    lu: Lu<usize, c64>,
}

impl SparseLu {
    pub fn new(a: &CsrMatrix<C64>) -> Result<Self> {
        if a.nrows != a.ncols {
            return Err(Error::Singular(format!("matrix is {}x{}, not square", a.nrows, a.ncols)));
        }
        let trips: Vec<Triplet<usize, usize, c64>> =
            a.triplets().into_iter().map(|(i, j, v)| Triplet::new(i, j, c64::new(v.re, v.im))).collect();
        let m = SparseColMat::<usize, c64>::try_new_from_triplets(a.nrows, a.ncols, &trips)
            .map_err(|e| Error::Singular(format!("{e:?}")))?;
        let lu = m.sp_lu().map_err(|e| Error::Singular(format!("{e:?}")))?;
        let solver = SparseLu { n: a.nrows, lu };
        // A zero pivot shows up as non-finite output rather than an error.
        let probe = solver.solve(&vec![C64::new(1.0, 0.0); a.nrows]);
        if probe.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Singular("zero pivot encountered".into()));
        }
        Ok(solver)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        let mut m = Mat::<c64>::from_fn(self.n, 1, |i, _| c64::new(b[i].re, b[i].im));
        self.lu.solve_in_place(m.as_mut());
        for (i, v) in b.iter_mut().enumerate() {
            let z = m[(i, 0)];
            *v = C64::new(z.re, z.im);
        }
    }
}
