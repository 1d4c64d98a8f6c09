//! Singular value decompositions computed from the eigendecomposition of the
//! smaller Gram matrix. Singular values are re-measured as `‖A v‖` instead of
//! `sqrt(λ)`, which keeps near-zero singular values near zero.

use crate::error::{Error, Result};
use crate::linalg::eigen::sym_eig;
use crate::linalg::matrix::{norm2, DenseMatrix};
use crate::linalg::qr::orthonormalize_completing;

/// Singular values below this fraction of the largest are clamped to zero.
pub const SIGMA_CLAMP: f64 = 1e-13;

/// Truncated SVD `Y ≈ U diag(sigma) Vᵀ`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Left singular vectors, `rows × k`.
    pub u: DenseMatrix,
    /// Nonnegative, descending.
    pub sigma: Vec<f64>,
    /// Right singular vectors, `cols × k`.
    pub v: DenseMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let scaled = DenseMatrix::from_fn(self.u.rows(), self.u.cols(), |i, j| self.u[(i, j)] * self.sigma[j]);
        scaled.matmul_nt(&self.v).expect("svd factors agree")
    }
}

/// Leading `k` singular triplets of `y`.
pub fn economy_svd(y: &DenseMatrix, k: usize) -> Result<Svd> {
    let (n, big_n) = y.shape();
    if k == 0 || k > n.min(big_n) {
        return Err(Error::Domain(format!(
            "rank {k} requested for a {n}x{big_n} matrix"
        )));
    }
    y.check_finite()?;
    let (left, sigma, right) = gram_triplets(y, k)?;
    Ok(Svd {
        u: DenseMatrix::from_columns(&left)?,
        sigma,
        v: DenseMatrix::from_columns(&right)?,
    })
}

/// Singular values of `p`, descending.
pub fn singular_values(p: &DenseMatrix) -> Result<Vec<f64>> {
    p.check_finite()?;
    let k = p.rows().min(p.cols());
    if k == 0 {
        return Ok(Vec::new());
    }
    Ok(gram_triplets(p, k)?.1)
}

/// Sum of singular values.
pub fn nuclear_norm(p: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(p)?.iter().sum())
}

/// Orthonormal `Q = U Vᵀ` maximizing `tr(Qᵀ P)` for square `P = U Σ Vᵀ`.
///
/// For rank-deficient `P` the singular vectors of the null space are not
/// unique; the completion picks standard basis vectors in index order, so the
/// result is deterministic but is only one of many maximizers.
pub fn procrustes(p: &DenseMatrix) -> Result<DenseMatrix> {
    if !p.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", p.rows(), p.cols())));
    }
    p.check_finite()?;
    let n = p.rows();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    let (u, _, v) = gram_triplets(p, n)?;
    let mut q = DenseMatrix::zeros(n, n);
    for (uc, vc) in u.iter().zip(&v) {
        for i in 0..n {
            let ui = uc[i];
            if ui == 0.0 {
                continue;
            }
            for (j, &vj) in vc.iter().enumerate() {
                q[(i, j)] += ui * vj;
            }
        }
    }
    Ok(q)
}

/// Returns `k` left vectors, singular values and right vectors.
fn gram_triplets(a: &DenseMatrix, k: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>)> {
    let (rows, cols) = a.shape();
    let wide = rows <= cols;
    // Eigenvectors of the smaller Gram matrix are the singular vectors on
    // that side.
    let gram = if wide { a.matmul_nt(a)? } else { a.matmul_tn(a)? };
    let eig = sym_eig(&gram)?;
    let dim = gram.rows();
    let mut side: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut sigma: Vec<f64> = Vec::with_capacity(k);
    for idx in (0..dim).rev().take(k) {
        let s = eig.vector(idx);
        let img = if wide { a.matvec_t(&s)? } else { a.matvec(&s)? };
        sigma.push(norm2(&img));
        side.push(s);
        images.push(img);
    }
    // Ordering of re-measured values can differ from the eigenvalue order
    // only by rounding; keep eigen order and clamp.
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let other_dim = if wide { cols } else { rows };
    let scaled: Vec<Vec<f64>> = images
        .iter()
        .zip(sigma.iter_mut())
        .map(|(img, s)| {
            if *s <= SIGMA_CLAMP * smax || *s == 0.0 {
                *s = 0.0;
                vec![0.0; other_dim]
            } else {
                img.iter().map(|x| x / *s).collect()
            }
        })
        .collect();
    let other = orthonormalize_completing(&scaled, other_dim);
    Ok(if wide { (side, sigma, other) } else { (other, sigma, side) })
}
