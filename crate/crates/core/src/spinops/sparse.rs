use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, RMat};

/// Tensor-product basis: site-major order, each site in its `S³` eigenbasis
/// with `m` descending. Index `i` has digits `(d_0, ..., d_{n-1})` with `d_0`
/// most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorBasis {
    pub site_ids: Vec<usize>,
    pub local_dims: Vec<usize>,
}

impl TensorBasis {
    pub fn new(site_ids: Vec<usize>, local_dims: Vec<usize>) -> Self {
        TensorBasis { site_ids, local_dims }
    }

    pub fn uniform(n_sites: usize, local_dim: usize) -> Self {
        TensorBasis { site_ids: (0..n_sites).collect(), local_dims: vec![local_dim; n_sites] }
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let n = self.local_dims.len();
        let mut s = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.local_dims[i + 1];
        }
        s
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut d = vec![0; self.local_dims.len()];
        for i in (0..d.len()).rev() {
            d[i] = index % self.local_dims[i];
            index /= self.local_dims[i];
        }
        d
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.local_dims).fold(0, |acc, (&d, &n)| acc * n + d)
    }

    pub fn describe(&self) -> String {
        format!(
            "site-major order over site ids {:?}; local dims {:?}; within each site S3 eigenbasis with m descending",
            self.site_ids, self.local_dims
        )
    }
}

/// Complex sparse matrix in CSR form with canonical (sorted, deduplicated)
/// entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    /// Sorts triplets by `(row, col)`, sums duplicates, and drops entries that
    /// cancel to exactly zero.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.par_sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut rows: Vec<usize> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r},{c}) outside dimension {dim}");
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        let keep: Vec<bool> = vals.iter().map(|v| v.re != 0.0 || v.im != 0.0).collect();
        let mut fc = Vec::with_capacity(cols.len());
        let mut fv = Vec::with_capacity(vals.len());
        for i in 0..rows.len() {
            if keep[i] {
                row_ptr[rows[i] + 1] += 1;
                fc.push(cols[i]);
                fv.push(vals[i]);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix { dim, row_ptr, cols: fc, vals: fv }
    }

    pub fn zeros(dim: usize) -> Self {
        SparseMatrix { dim, row_ptr: vec![0; dim + 1], cols: vec![], vals: vec![] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect())
    }

    pub fn from_dense(m: &CMat) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != Complex64::new(0.0, 0.0) {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Canonical entries, sorted by row then column.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let slice = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match slice.binary_search(&c) {
            Ok(k) => self.vals[self.row_ptr[r] + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    pub fn matvec(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_fn(self.dim, |r, _| self.row(r).map(|(c, a)| a * v[c]).sum())
    }

    pub fn matvec_real(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim, |r, _| self.row(r).map(|(c, a)| a.re * v[c]).sum())
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Dense block `M[indices, indices]`.
    pub fn block(&self, indices: &[usize]) -> CMat {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            pos[i] = k;
        }
        let mut m = CMat::zeros(indices.len(), indices.len());
        for (k, &r) in indices.iter().enumerate() {
            for (c, v) in self.row(r) {
                if pos[c] != usize::MAX {
                    m[(k, pos[c])] = v;
                }
            }
        }
        m
    }

    pub fn block_real(&self, indices: &[usize]) -> RMat {
        self.block(indices).map(|z| z.re)
    }

    pub fn adjoint(&self) -> SparseMatrix {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect())
    }

    pub fn scale(&self, a: Complex64) -> SparseMatrix {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= a);
        out
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()).collect())
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, other.dim);
        let rows: Vec<Vec<(usize, usize, Complex64)>> = (0..self.dim)
            .into_par_iter()
            .map(|r| {
                let mut acc: Vec<(usize, usize, Complex64)> = Vec::new();
                for (k, a) in self.row(r) {
                    for (c, b) in other.row(k) {
                        acc.push((r, c, a * b));
                    }
                }
                acc
            })
            .collect();
        Self::from_triplets(self.dim, rows.into_iter().flatten().collect())
    }

    pub fn commutator(&self, other: &SparseMatrix) -> SparseMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum, an upper bound on the operator norm.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.dim).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }
}

/// Sparse Hermitian operator on a tensor-product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    matrix: SparseMatrix,
    basis: TensorBasis,
}

impl SparseHermitian {
    pub const HERMITIAN_TOL: f64 = 1e-12;

    pub fn new(basis: TensorBasis, matrix: SparseMatrix) -> Result<Self> {
        if matrix.dim() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {} vs basis dimension {}",
                matrix.dim(),
                basis.dim()
            )));
        }
        let residual = matrix.hermiticity_residual();
        if residual > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(SparseHermitian { matrix, basis })
    }

    pub fn from_triplets(basis: TensorBasis, triplets: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        let dim = basis.dim();
        if let Some(t) = triplets.iter().find(|t| t.0 >= dim || t.1 >= dim) {
            return Err(Error::DimensionMismatch(format!("entry ({}, {}) outside dimension {dim}", t.0, t.1)));
        }
        Self::new(basis, SparseMatrix::from_triplets(dim, triplets))
    }

    pub fn zero(basis: TensorBasis) -> Self {
        let dim = basis.dim();
        SparseHermitian { matrix: SparseMatrix::zeros(dim), basis }
    }

    pub fn from_dense(basis: TensorBasis, m: &CMat) -> Result<Self> {
        Self::new(basis, SparseMatrix::from_dense(m))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn basis(&self) -> &TensorBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn to_dense(&self) -> CMat {
        self.matrix.to_dense()
    }

    pub fn add(&self, other: &SparseHermitian) -> Result<SparseHermitian> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch("operators live on different bases".into()));
        }
        Ok(SparseHermitian { matrix: self.matrix.add(&other.matrix), basis: self.basis.clone() })
    }

    pub fn scale(&self, a: f64) -> SparseHermitian {
        SparseHermitian { matrix: self.matrix.scale(Complex64::new(a, 0.0)), basis: self.basis.clone() }
    }

    /// `H + a·1`.
    pub fn shift(&self, a: f64) -> SparseHermitian {
        let id = SparseMatrix::identity(self.dim()).scale(Complex64::new(a, 0.0));
        SparseHermitian { matrix: self.matrix.add(&id), basis: self.basis.clone() }
    }

    /// Writes coordinate triplets as CSV (`row,col,re,im`) after a comment line
    /// recording the dimension and basis ordering.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# dim={}; basis: {}", self.dim(), self.basis.describe())?;
        writeln!(w, "row,col,re,im")?;
        for (r, c, v) in self.matrix.triplets() {
            writeln!(w, "{},{},{:?},{:?}", r, c, v.re, v.im)?;
        }
        Ok(())
    }
}
