//! Compressed sparse rows over `Complex64`, and a thin wrapper around the
//! faer sparse LU used for every steady-state solve.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::MatMut;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Accumulates `(row, col, value)` entries; duplicates are summed on build.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, capacity: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if value != C64::new(0.0, 0.0) {
            self.entries.push((row, col, value));
        }
    }

    pub fn push_real(&mut self, row: usize, col: usize, value: f64) {
        self.push(row, col, C64::new(value, 0.0));
    }

    pub fn build(mut self) -> SparseMatrix {
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(self.entries.len());
        let mut values: Vec<C64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Immutable CSR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r)
            .find(|&(col, _)| col == c)
            .map_or(C64::new(0.0, 0.0), |(_, v)| v)
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, out) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            let mut acc = C64::new(0.0, 0.0);
            for (&c, &v) in self.col_idx[span.clone()].iter().zip(&self.values[span]) {
                acc += v * x[c];
            }
            *out = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// Copy with row `r` replaced by the given entries.
    pub fn with_row_replaced(&self, r: usize, row: &[(usize, C64)]) -> SparseMatrix {
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + row.len());
        for (i, c, v) in self.entries().filter(|&(i, _, _)| i != r) {
            b.push(i, c, v);
        }
        for &(c, v) in row {
            b.push(r, c, v);
        }
        b.build()
    }

    /// Largest absolute row sum (the induced ∞-norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.nrows.min(self.ncols))
            .map(|r| self.get(r, r).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, C64>> {
        let triplets: Vec<_> = self
            .entries()
            .map(|(r, c, v)| Triplet::new(r, c, v))
            .collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }
}

/// Sparse LU factorization of a square matrix.
pub struct LuSolver {
    lu: Lu<usize, C64>,
    dim: usize,
}

impl LuSolver {
    pub fn factorize(m: &SparseMatrix) -> Result<Self> {
        assert_eq!(m.nrows(), m.ncols(), "LU needs a square matrix");
        let lu = m
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(Self { lu, dim: m.nrows() })
    }

    pub fn solve_in_place(&self, rhs: &mut [C64]) {
        assert_eq!(rhs.len(), self.dim);
        self.lu
            .solve_in_place(MatMut::from_column_major_slice_mut(rhs, self.dim, 1));
    }

    pub fn solve_adjoint_in_place(&self, rhs: &mut [C64]) {
        assert_eq!(rhs.len(), self.dim);
        self.lu
            .solve_adjoint_in_place(MatMut::from_column_major_slice_mut(rhs, self.dim, 1));
    }

    /// Estimates the smallest singular value by inverse iteration on `(AᴴA)⁻¹`.
    ///
    /// The start vector comes from a fixed seed, so repeated calls agree.
    pub fn min_singular_value_estimate(&self, iterations: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut x: Vec<C64> = (0..self.dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        normalize(&mut x);
        let mut mu = 0.0;
        for _ in 0..iterations.max(1) {
            self.solve_adjoint_in_place(&mut x);
            self.solve_in_place(&mut x);
            mu = normalize(&mut x);
            if !mu.is_finite() {
                return 0.0;
            }
        }
        if mu > 0.0 {
            1.0 / mu.sqrt()
        } else {
            f64::INFINITY
        }
    }
}

fn normalize(x: &mut [C64]) -> f64 {
    let n = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

pub fn max_abs(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
