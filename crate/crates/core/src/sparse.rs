//! Sparse representations: columnwise hard thresholding for orthonormal
//! dictionaries and OMP with incremental Cholesky updates for general ones.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, norm2, DenseMatrix};

/// `n × N` matrix with at most `s` stored nonzeros per column, column
/// compressed. Row indices within a column are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCodeMatrix {
    n: usize,
    s: usize,
    col_ptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseCodeMatrix {
    /// Builds from per-column `(row, value)` lists, sorted or not. Zero values
    /// are dropped.
    pub fn from_columns(n: usize, s: usize, columns: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for (j, mut col) in columns.into_iter().enumerate() {
            col.retain(|&(_, v)| v != 0.0);
            col.sort_by_key(|&(i, _)| i);
            if col.len() > s {
                return Err(Error::Domain(format!("column {j} has {} entries, budget is {s}", col.len())));
            }
            for w in col.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Domain(format!("column {j} repeats row {}", w[0].0)));
                }
            }
            for (i, v) in col {
                if i >= n {
                    return Err(Error::Domain(format!("row {i} out of range for n = {n}")));
                }
                if !v.is_finite() {
                    return Err(Error::Domain(format!("non-finite value in column {j}")));
                }
                indices.push(i);
                values.push(v);
            }
            col_ptr.push(indices.len());
        }
        Ok(Self {
            n,
            s,
            col_ptr,
            indices,
            values,
        })
    }

    pub fn zeros(n: usize, cols: usize, s: usize) -> Self {
        Self {
            n,
            s,
            col_ptr: vec![0; cols + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn sparsity(&self) -> usize {
        self.s
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored `(row, value)` pairs of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.indices[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn column_support(&self, j: usize) -> &[usize] {
        &self.indices[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n, self.cols());
        for j in 0..self.cols() {
            for (i, v) in self.column(j) {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `X Yᵀ` for a dense `y` with the same number of columns.
    pub fn mul_dense_t(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        if y.cols() != self.cols() {
            return Err(Error::dims(format!("{} columns", self.cols()), format!("{}", y.cols())));
        }
        let mut out = DenseMatrix::zeros(self.n, y.rows());
        for k in 0..self.cols() {
            for (j, x) in self.column(k) {
                let row = out.row_mut(j);
                for (i, o) in row.iter_mut().enumerate() {
                    *o += x * y[(i, k)];
                }
            }
        }
        Ok(out)
    }

    /// `D X` for a dense `d` with `n` columns.
    pub fn left_mul_dense(&self, d: &DenseMatrix) -> Result<DenseMatrix> {
        if d.cols() != self.n {
            return Err(Error::dims(format!("{} columns", self.n), format!("{}", d.cols())));
        }
        let mut out = DenseMatrix::zeros(d.rows(), self.cols());
        for k in 0..self.cols() {
            for (j, x) in self.column(k) {
                for i in 0..d.rows() {
                    out[(i, k)] += d[(i, j)] * x;
                }
            }
        }
        Ok(out)
    }
}

/// Descending magnitude, then ascending index.
#[inline]
fn by_magnitude(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0))
}

/// Keeps the `s` largest-magnitude entries of every column of `z`. Ties go to
/// the lower row index. Selection is a linear-time partial select per column.
pub fn hard_threshold_top_s(z: &DenseMatrix, s: usize) -> Result<SparseCodeMatrix> {
    let (n, cols) = z.shape();
    if s == 0 || s > n {
        return Err(Error::Domain(format!("sparsity {s} out of range 1..={n}")));
    }
    z.check_finite()?;
    let mut col_ptr = Vec::with_capacity(cols + 1);
    let mut indices = Vec::with_capacity(cols * s);
    let mut values = Vec::with_capacity(cols * s);
    col_ptr.push(0);
    let mut buf: Vec<(usize, f64)> = Vec::with_capacity(n);
    for j in 0..cols {
        buf.clear();
        buf.extend((0..n).map(|i| (i, z[(i, j)])));
        let kept = if s < n {
            buf.select_nth_unstable_by(s - 1, by_magnitude);
            &mut buf[..s]
        } else {
            &mut buf[..]
        };
        kept.sort_unstable_by_key(|&(i, _)| i);
        for &(i, v) in kept.iter() {
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        }
        col_ptr.push(indices.len());
    }
    Ok(SparseCodeMatrix {
        n,
        s,
        col_ptr,
        indices,
        values,
    })
}

/// Result of one OMP solve.
#[derive(Debug, Clone, PartialEq)]
pub struct OmpSolution {
    /// Selected atoms in selection order.
    pub support: Vec<usize>,
    /// Least-squares coefficients aligned with `support`.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    /// The Cholesky factor broke down before `s` atoms were chosen.
    pub breakdown: bool,
}

impl OmpSolution {
    /// Coefficients as `(atom, value)` sorted by atom.
    pub fn sorted(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = self.support.iter().copied().zip(self.coefficients.iter().copied()).collect();
        out.sort_by_key(|&(i, _)| i);
        out
    }
}

pub const OMP_RESIDUAL_TOL: f64 = 1e-12;
pub const UNIT_COLUMN_TOL: f64 = 1e-8;
const CHOLESKY_PIVOT_TOL: f64 = 1e-14;

/// Orthogonal matching pursuit with an incrementally grown Cholesky factor of
/// the selected Gram matrix. `d` must have unit-norm columns.
pub fn omp_cholesky(d: &DenseMatrix, y: &[f64], s: usize) -> Result<OmpSolution> {
    omp_cholesky_masked(d, y, s, None)
}

/// As [`omp_cholesky`], restricted to atoms flagged in `eligible`. Columns
/// that are not eligible are neither checked nor selected.
pub fn omp_cholesky_masked(d: &DenseMatrix, y: &[f64], s: usize, eligible: Option<&[bool]>) -> Result<OmpSolution> {
    let (n, k) = d.shape();
    if y.len() != n {
        return Err(Error::dims(format!("signal of length {n}"), format!("{}", y.len())));
    }
    if s > n.min(k) {
        return Err(Error::Domain(format!("sparsity {s} exceeds min({n}, {k})")));
    }
    if let Some(mask) = eligible {
        if mask.len() != k {
            return Err(Error::dims(format!("mask of length {k}"), format!("{}", mask.len())));
        }
    }
    let allowed = |j: usize| eligible.map_or(true, |m| m[j]);
    let atoms: Vec<Vec<f64>> = (0..k).map(|j| d.column(j)).collect();
    for (j, a) in atoms.iter().enumerate() {
        if allowed(j) && (norm2(a) - 1.0).abs() > UNIT_COLUMN_TOL {
            return Err(Error::Domain(format!("atom {j} is not unit norm")));
        }
    }

    let target: Vec<f64> = atoms.iter().map(|a| dot(a, y)).collect();
    let mut residual = y.to_vec();
    let mut support: Vec<usize> = Vec::with_capacity(s);
    let mut chosen = vec![false; k];
    // Row-wise lower-triangular factor of D_Iᵀ D_I.
    let mut chol: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut coefficients: Vec<f64> = Vec::new();
    let mut breakdown = false;

    while support.len() < s && norm2(&residual) >= OMP_RESIDUAL_TOL {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..k).filter(|&j| allowed(j) && !chosen[j]) {
            let c = dot(&atoms[j], &residual).abs();
            if best.map_or(true, |(_, bc)| c > bc) {
                best = Some((j, c));
            }
        }
        let Some((j, corr)) = best else { break };
        if corr == 0.0 {
            break;
        }

        let g: Vec<f64> = support.iter().map(|&i| dot(&atoms[i], &atoms[j])).collect();
        let w = forward_substitute(&chol, &g);
        let pivot = dot(&atoms[j], &atoms[j]) - dot(&w, &w);
        if pivot <= CHOLESKY_PIVOT_TOL {
            breakdown = true;
            break;
        }
        let mut row = w;
        row.push(pivot.sqrt());
        chol.push(row);
        support.push(j);
        chosen[j] = true;

        let rhs: Vec<f64> = support.iter().map(|&i| target[i]).collect();
        coefficients = back_substitute_t(&chol, &forward_substitute(&chol, &rhs));
        residual.copy_from_slice(y);
        for (&i, &c) in support.iter().zip(&coefficients) {
            for (r, a) in residual.iter_mut().zip(&atoms[i]) {
                *r -= c * a;
            }
        }
    }

    Ok(OmpSolution {
        residual_norm: norm2(&residual),
        support,
        coefficients,
        breakdown,
    })
}

/// Solves `L w = b` for the row-stored lower-triangular `L`.
fn forward_substitute(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let mut w = Vec::with_capacity(b.len());
    for (i, row) in l.iter().enumerate() {
        let partial: f64 = row[..i].iter().zip(&w).map(|(a, x)| a * x).sum();
        w.push((b[i] - partial) / row[i]);
    }
    w
}

/// Solves `Lᵀ x = b`.
fn back_substitute_t(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let k = b.len();
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = b[i];
        for (r, xr) in l.iter().zip(x.iter()).skip(i + 1) {
            acc -= r[i] * xr;
        }
        x[i] = acc / l[i][i];
    }
    x
}
