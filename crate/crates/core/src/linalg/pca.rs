use crate::error::{Error, Result};
use crate::linalg::eigen::sym_eig;
use crate::linalg::matrix::{dot, DenseMatrix};
use crate::linalg::qr::orthonormalize_completing;
use crate::linalg::random::{gaussian_vector, seeded_rng};

pub const POWER_ITERATIONS: usize = 100;
pub const SUBSPACE_TOL: f64 = 1e-10;

/// Approximate leading `k` principal directions of the columns of `y`
/// (block power iteration on `Y Yᵀ`, re-orthonormalized every step, then a
/// Rayleigh-Ritz rotation so the columns come out in descending variance).
pub fn partial_principal_components(y: &DenseMatrix, k: usize, seed: u64) -> Result<DenseMatrix> {
    let n = y.rows();
    if k > n {
        return Err(Error::Domain(format!("{k} components requested in dimension {n}")));
    }
    y.check_finite()?;
    if k == 0 {
        return Ok(DenseMatrix::zeros(n, 0));
    }
    let gram = y.matmul_nt(y)?;
    let mut rng = seeded_rng(seed);
    let start: Vec<Vec<f64>> = (0..k).map(|_| gaussian_vector(&mut rng, n)).collect();
    let mut basis = orthonormalize_completing(&start, n);

    for _ in 0..POWER_ITERATIONS {
        let images: Vec<Vec<f64>> = basis.iter().map(|v| gram.matvec(v).expect("square")).collect();
        let next = orthonormalize_completing(&images, n);
        let change = subspace_distance(&basis, &next);
        basis = next;
        if change < SUBSPACE_TOL {
            break;
        }
    }

    // Rayleigh-Ritz on the k-dimensional subspace.
    let v = DenseMatrix::from_columns(&basis)?;
    let small = v.matmul_tn(&gram.matmul(&v)?)?.symmetrize_sum().scale(0.5);
    let eig = sym_eig(&small)?;
    let rotated = v.matmul(&eig.vectors)?;
    let mut out = DenseMatrix::zeros(n, k);
    for (dst, src) in (0..k).zip((0..k).rev()) {
        let mut col = rotated.column(src);
        crate::linalg::eigen::canonicalize_sign(&mut col);
        out.set_column(dst, &col);
    }
    Ok(out)
}

/// `‖P_a − P_b‖_F / sqrt(2k)` for orthonormal bases of equal size.
fn subspace_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let k = a.len() as f64;
    let overlap: f64 = a.iter().flat_map(|x| b.iter().map(move |y| dot(x, y).powi(2))).sum();
    ((2.0 * k - 2.0 * overlap).max(0.0) / (2.0 * k)).sqrt()
}
