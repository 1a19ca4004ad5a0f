use std::fmt::Debug;
use std::io::Write;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::{Result, C64};

/// Entry type of a [`CsrMatrix`]: `f64` or [`C64`].
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + 'static
{
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_c64(self) -> C64;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
    fn is_complex() -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
    fn is_complex() -> bool {
        false
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    fn to_c64(self) -> C64 {
        self
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn is_complex() -> bool {
        true
    }
}

/// Compressed sparse row matrix with sorted column indices and no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    /// Duplicates are summed in input order, so equal inputs give bitwise
    /// equal matrices; exact zeros after summation are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) outside {nrows}x{ncols}");
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![T::zero(); triplets.len()];
        let mut fill = counts.clone();
        for &(i, j, v) in triplets {
            cols[fill[i]] = j;
            vals[fill[i]] = v;
            fill[i] += 1;
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for i in 0..nrows {
            let (a, b) = (counts[i], counts[i + 1]);
            order.clear();
            order.extend(a..b);
            order.sort_by_key(|&k| cols[k]);
            let mut k = 0;
            while k < order.len() {
                let j = cols[order[k]];
                let mut s = vals[order[k]];
                k += 1;
                while k < order.len() && cols[order[k]] == j {
                    s += vals[order[k]];
                    k += 1;
                }
                if s != T::zero() {
                    indices.push(j);
                    data.push(s);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix { nrows, ncols, indptr, indices, data }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.data[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.data[r.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        (0..self.nrows).flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v))).collect()
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![T::zero(); self.nrows];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = T::zero();
            for (j, v) in self.row(i) {
                s += v * x[j];
            }
            *yi = s;
        }
        y
    }

    /// Product with a complex vector.
    pub fn matvec_c(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| self.row(i).fold(C64::new(0.0, 0.0), |s, (j, v)| s + v.to_c64() * x[j]))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<(usize, usize, T)> = self.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    /// Rows `rows` and columns `cols`, in the given orders.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut colmap = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            colmap[c] = k;
        }
        let mut t = Vec::new();
        for (r, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if colmap[j] != usize::MAX {
                    t.push((r, colmap[j], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), &t)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        let t: Vec<(usize, usize, U)> = self.triplets().into_iter().map(|(i, j, v)| (i, j, f(v))).collect();
        CsrMatrix::from_triplets(self.nrows, self.ncols, &t)
    }

    /// self + s·other.
    pub fn add_scaled(&self, other: &Self, s: T) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = self.triplets();
        t.extend(other.triplets().into_iter().map(|(i, j, v)| (i, j, s * v)));
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.modulus().powi(2)).sum::<f64>().sqrt()
    }

    /// max |a_ij − a_ji| / max |a_ij|.
    pub fn symmetry_error(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).modulus());
            }
        }
        worst / m
    }

    /// Coordinate text: `i j re` for real, `i j re im` for complex entries.
    pub fn write_coordinate(&self, out: &mut impl Write) -> Result<()> {
        for (i, j, v) in self.triplets() {
            let c = v.to_c64();
            if T::is_complex() {
                writeln!(out, "{i} {j} {:?} {:?}", c.re, c.im)?;
            } else {
                writeln!(out, "{i} {j} {:?}", c.re)?;
            }
        }
        Ok(())
    }
}
