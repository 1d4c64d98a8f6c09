use std::f64::consts::PI;

use crate::linalg::matrix::DenseMatrix;

use super::patches::{PATCH_DIM, PATCH_EDGE};

/// Orthonormal DCT-II matrix of size `n`; row `k` is the `k`-th cosine.
pub fn dct_1d(n: usize) -> DenseMatrix {
    let nf = n as f64;
    DenseMatrix::from_fn(n, n, |k, i| {
        let alpha = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        alpha * (PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos()
    })
}

/// Separable 2D DCT-II basis for vectorized 8×8 patches. Atom
/// `k2·8 + k1` is the patch `C[k1][r]·C[k2][c]` at vector index `c·8 + r`.
pub fn dct_dictionary() -> DenseMatrix {
    let c = dct_1d(PATCH_EDGE);
    DenseMatrix::from_fn(PATCH_DIM, PATCH_DIM, |i, j| {
        let (col, row) = (i / PATCH_EDGE, i % PATCH_EDGE);
        let (k2, k1) = (j / PATCH_EDGE, j % PATCH_EDGE);
        c[(k1, row)] * c[(k2, col)]
    })
}
