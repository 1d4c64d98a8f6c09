//! Reference implementations used only by tests. They favor obviousness over
//! speed and share no code with the library beyond `DenseMatrix` storage.
#![allow(dead_code)]

use hhdl::linalg::random::{gaussian_matrix, seeded_rng, SeededRng};
use hhdl::sparse::SparseCodeMatrix;
use hhdl::{DenseMatrix, Reflector};
use rand::Rng;

pub fn naive_matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

pub fn reflector_matrix(u: &[f64]) -> DenseMatrix {
    let n = u.len();
    DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * u[i] * u[j])
}

/// `U_m ⋯ U_1` by explicit dense products.
pub fn dense_product(reflectors: &[Reflector], n: usize) -> DenseMatrix {
    let mut out = DenseMatrix::identity(n);
    for r in reflectors {
        out = naive_matmul(&reflector_matrix(r.vector()), &out);
    }
    out
}

/// Cyclic Jacobi eigendecomposition: ascending values, eigenvectors as
/// columns.
pub fn jacobi_eigen(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= 1e-30 * m.frobenius_sq().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Singular values from the Jacobi eigenvalues of `AᵀA`, descending.
pub fn jacobi_singular_values(a: &DenseMatrix) -> Vec<f64> {
    let gram = naive_matmul(&a.transpose(), a);
    let (values, _) = jacobi_eigen(&gram);
    let mut s: Vec<f64> = values.iter().map(|v| v.max(0.0).sqrt()).collect();
    s.reverse();
    s.truncate(a.rows().min(a.cols()));
    s
}

pub fn jacobi_nuclear_norm(a: &DenseMatrix) -> f64 {
    jacobi_singular_values(a).iter().sum()
}

/// Top-`s` per column by sorting every entry: magnitude descending, index
/// ascending; zeros dropped; output sorted by index.
pub fn full_sort_threshold(z: &DenseMatrix, s: usize) -> Vec<Vec<(usize, f64)>> {
    (0..z.cols())
        .map(|j| {
            let mut entries: Vec<(usize, f64)> = (0..z.rows()).map(|i| (i, z[(i, j)])).collect();
            entries.sort_by(|a, b| b.1.abs().partial_cmp(&a.1.abs()).unwrap().then(a.0.cmp(&b.0)));
            let mut kept: Vec<(usize, f64)> = entries.into_iter().take(s).filter(|e| e.1 != 0.0).collect();
            kept.sort_by_key(|e| e.0);
            kept
        })
        .collect()
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let acc: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - acc) / a[i][i];
    }
    x
}

/// OMP with a fresh normal-equation solve per step.
pub fn naive_omp(d: &DenseMatrix, y: &[f64], s: usize) -> (Vec<usize>, Vec<f64>) {
    let (n, k) = d.shape();
    let col = |j: usize| -> Vec<f64> { (0..n).map(|i| d[(i, j)]).collect() };
    let dotv = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let mut support: Vec<usize> = Vec::new();
    let mut coef: Vec<f64> = Vec::new();
    let mut residual = y.to_vec();
    while support.len() < s && dotv(&residual, &residual).sqrt() >= 1e-12 {
        let mut best = None::<(usize, f64)>;
        for j in (0..k).filter(|j| !support.contains(j)) {
            let c = dotv(&col(j), &residual).abs();
            if best.map_or(true, |(_, b)| c > b) {
                best = Some((j, c));
            }
        }
        let (j, _) = best.unwrap();
        support.push(j);
        let cols: Vec<Vec<f64>> = support.iter().map(|&i| col(i)).collect();
        let gram: Vec<Vec<f64>> = cols.iter().map(|a| cols.iter().map(|b| dotv(a, b)).collect()).collect();
        let rhs: Vec<f64> = cols.iter().map(|a| dotv(a, y)).collect();
        coef = gauss_solve(gram, rhs);
        residual = y.to_vec();
        for (c, a) in coef.iter().zip(&cols) {
            for (r, v) in residual.iter_mut().zip(a) {
                *r -= c * v;
            }
        }
    }
    (support, coef)
}

pub fn random_data(seed: u64, n: usize, cols: usize) -> DenseMatrix {
    gaussian_matrix(&mut seeded_rng(seed), n, cols)
}

/// Matrix with unit-norm Gaussian columns.
pub fn unit_columns(rng: &mut SeededRng, n: usize, k: usize) -> DenseMatrix {
    let g = gaussian_matrix(rng, n, k);
    let norms: Vec<f64> = (0..k).map(|j| (0..n).map(|i| g[(i, j)] * g[(i, j)]).sum::<f64>().sqrt()).collect();
    DenseMatrix::from_fn(n, k, |i, j| g[(i, j)] / norms[j])
}

/// `Q₀ X₀` with exactly `s`-sparse Gaussian codes.
pub fn sparse_ground_truth(rng: &mut SeededRng, q0: &DenseMatrix, s: usize, cols: usize) -> (DenseMatrix, SparseCodeMatrix) {
    let n = q0.rows();
    let columns: Vec<Vec<(usize, f64)>> = (0..cols)
        .map(|_| {
            let idx = rand::seq::index::sample(rng, n, s).into_vec();
            let mut c: Vec<(usize, f64)> = idx.into_iter().map(|i| (i, 1.0 + rng.gen::<f64>())).collect();
            c.sort_by_key(|e| e.0);
            c
        })
        .collect();
    let x = SparseCodeMatrix::from_columns(n, s, columns).unwrap();
    (x.left_mul_dense(q0).unwrap(), x)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
