mod common;

use common::{jacobi_eigen, jacobi_nuclear_norm, jacobi_singular_values, naive_matmul, random_data};
use hhdl::linalg::eigen::canonicalize_sign;
use hhdl::linalg::random::{gaussian_matrix, random_orthonormal, seeded_rng};
use hhdl::linalg::{
    economy_svd, nuclear_norm, partial_principal_components, procrustes, qr_orthonormalize, singular_values,
    sym_eig, sym_eig_smallest,
};
use hhdl::{DenseMatrix, Error};
use proptest::prelude::*;

fn random_symmetric(seed: u64, n: usize) -> DenseMatrix {
    random_data(seed, n, n).symmetrize_sum()
}

#[test]
fn eigenvalues_match_jacobi() {
    for (seed, n) in [(1u64, 2usize), (2, 5), (3, 16), (4, 33), (5, 64)] {
        let a = random_symmetric(seed, n);
        let eig = sym_eig(&a).unwrap();
        let (oracle, _) = jacobi_eigen(&a);
        let scale = a.frobenius_norm();
        for (x, y) in eig.values.iter().zip(&oracle) {
            assert!((x - y).abs() <= 1e-12 * scale, "n={n}: {x} vs {y}");
        }
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(eig.vectors.orthonormality_deviation() < 1e-12);
        let lambda = DenseMatrix::from_diag(&eig.values);
        let rebuilt = naive_matmul(&naive_matmul(&eig.vectors, &lambda), &eig.vectors.transpose());
        assert!(rebuilt.max_abs_diff(&a) < 1e-12 * scale);
    }
}

#[test]
fn eigenvectors_match_jacobi_up_to_sign() {
    let a = random_symmetric(11, 10);
    let eig = sym_eig(&a).unwrap();
    let (_, vectors) = jacobi_eigen(&a);
    for i in 0..10 {
        let mut ours = eig.vector(i);
        let mut theirs = vectors.column(i);
        canonicalize_sign(&mut ours);
        canonicalize_sign(&mut theirs);
        let diff = ours.iter().zip(&theirs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "vector {i} differs by {diff}");
    }
}

#[test]
fn eigen_sign_convention() {
    let a = random_symmetric(12, 7);
    let eig = sym_eig(&a).unwrap();
    for i in 0..7 {
        let v = eig.vector(i);
        let big = v.iter().cloned().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        assert!(big > 0.0);
    }
}

#[test]
fn smallest_pairs_are_a_prefix() {
    let a = random_symmetric(13, 12);
    let full = sym_eig(&a).unwrap();
    let part = sym_eig_smallest(&a, 4).unwrap();
    assert_eq!(part.len(), 4);
    assert_eq!(&full.values[..4], &part.values[..]);
    assert!(matches!(sym_eig_smallest(&a, 0), Err(Error::Domain(_))));
    assert!(matches!(sym_eig_smallest(&a, 13), Err(Error::Domain(_))));
}

#[test]
fn eigen_rejects_asymmetric() {
    let a = DenseMatrix::new(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
    assert!(matches!(sym_eig(&a), Err(Error::SymmetryViolation { .. })));
}

#[test]
fn eigen_degenerate_spectra() {
    let eig = sym_eig(&DenseMatrix::identity(6)).unwrap();
    assert!(eig.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    let eig = sym_eig(&DenseMatrix::zeros(4, 4)).unwrap();
    assert!(eig.values.iter().all(|&v| v == 0.0));
    assert!(eig.vectors.orthonormality_deviation() < 1e-15);
}

#[test]
fn singular_values_match_jacobi() {
    for (seed, r, c) in [(21u64, 6usize, 20usize), (22, 20, 6), (23, 9, 9)] {
        let a = random_data(seed, r, c);
        let ours = singular_values(&a).unwrap();
        let oracle = jacobi_singular_values(&a);
        for (x, y) in ours.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-10 * oracle[0]);
        }
        assert!((nuclear_norm(&a).unwrap() - jacobi_nuclear_norm(&a)).abs() < 1e-10 * oracle[0]);
    }
}

#[test]
fn economy_svd_reconstructs_low_rank() {
    let mut rng = seeded_rng(31);
    let left = gaussian_matrix(&mut rng, 12, 3);
    let right = gaussian_matrix(&mut rng, 3, 40);
    let a = left.matmul(&right).unwrap();
    let svd = economy_svd(&a, 3).unwrap();
    assert!(svd.reconstruct().max_abs_diff(&a) < 1e-10 * a.max_abs());
    assert!(svd.u.orthonormality_deviation() < 1e-10);
    assert!(svd.v.orthonormality_deviation() < 1e-10);
    assert!(economy_svd(&a, 13).is_err());
    let full = economy_svd(&a, 12).unwrap();
    assert!(full.sigma[3..].iter().all(|&s| s == 0.0));
    assert!(full.u.orthonormality_deviation() < 1e-10);
}

#[test]
fn procrustes_maximizes_trace() {
    let p = random_data(41, 8, 8);
    let q = procrustes(&p).unwrap();
    assert!(q.orthonormality_deviation() < 1e-12);
    let best = q.matmul_tn(&p).unwrap().trace();
    assert!((best - jacobi_nuclear_norm(&p)).abs() < 1e-10 * best);
    let mut rng = seeded_rng(42);
    for _ in 0..20 {
        let other = random_orthonormal(&mut rng, 8);
        assert!(other.matmul_tn(&p).unwrap().trace() <= best + 1e-12);
    }
    // Qᵀ P is symmetric positive semidefinite at the maximizer.
    let s = q.matmul_tn(&p).unwrap();
    assert!(s.max_asymmetry() < 1e-12 * s.frobenius_norm());
    assert!(sym_eig(&s.symmetrize_sum().scale(0.5)).unwrap().values[0] > -1e-12);
}

#[test]
fn procrustes_fixes_psd_input() {
    let a = random_data(43, 5, 9);
    let psd = naive_matmul(&a, &a.transpose());
    let q = procrustes(&psd).unwrap();
    assert!(q.max_abs_diff(&DenseMatrix::identity(5)) < 1e-10);
}

#[test]
fn qr_orthonormalize_keeps_span_and_order() {
    let a = random_data(51, 7, 4);
    let q = qr_orthonormalize(&a.columns()).unwrap();
    let qm = DenseMatrix::from_columns(&q).unwrap();
    assert!(qm.orthonormality_deviation() < 1e-14);
    // Q Qᵀ a_j = a_j and the first output is parallel to the first input.
    let proj = naive_matmul(&qm, &qm.transpose());
    assert!(naive_matmul(&proj, &a).max_abs_diff(&a) < 1e-12);
    let first = a.column(0);
    let norm = first.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(first.iter().zip(&q[0]).all(|(x, y)| (x / norm - y).abs() < 1e-14));
    let dependent = vec![vec![1.0, 0.0], vec![2.0, 0.0]];
    assert!(matches!(qr_orthonormalize(&dependent), Err(Error::Degenerate { index: 1 })));
}

#[test]
fn pca_recovers_axis_basis() {
    let y = DenseMatrix::from_fn(4, 4, |i, j| if i == j { [1.0, 4.0, 2.0, 3.0][i] } else { 0.0 });
    let pcs = partial_principal_components(&y, 4, 0).unwrap();
    let expected = [1usize, 3, 2, 0];
    for (col, &axis) in expected.iter().enumerate() {
        assert!((pcs[(axis, col)].abs() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn pca_is_deterministic() {
    let y = random_data(61, 20, 100);
    let a = partial_principal_components(&y, 5, 9).unwrap();
    let b = partial_principal_components(&y, 5, 9).unwrap();
    assert_eq!(a.as_slice(), b.as_slice());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_eigen_residual(seed in any::<u64>(), n in 1usize..20) {
        let a = random_symmetric(seed, n);
        let eig = sym_eig(&a).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        for i in 0..n {
            let v = eig.vector(i);
            let av = a.matvec(&v).unwrap();
            let r = av.iter().zip(&v).map(|(x, y)| (x - eig.values[i] * y).powi(2)).sum::<f64>().sqrt();
            prop_assert!(r < 1e-12 * scale);
        }
    }

    #[test]
    fn prop_procrustes_orthonormal(seed in any::<u64>(), n in 1usize..12) {
        let q = procrustes(&random_data(seed, n, n)).unwrap();
        prop_assert!(q.orthonormality_deviation() < 1e-10);
    }

    #[test]
    fn prop_random_orthonormal(seed in any::<u64>(), n in 1usize..24) {
        let q = random_orthonormal(&mut seeded_rng(seed), n);
        prop_assert!(q.orthonormality_deviation() < 1e-12);
    }
}
