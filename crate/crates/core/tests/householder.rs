mod common;

use common::{dense_product, naive_matmul, random_data, reflector_matrix};
use hhdl::complexity::{measure_apply_cost, OpCounter};
use hhdl::householder::{
    factorize_orthonormal, reflect_matrix_left, reflect_matrix_right, reflect_vector, triangularize_basis,
};
use hhdl::linalg::random::{random_orthonormal, random_unit_vector, seeded_rng};
use hhdl::linalg::{economy_svd, qr_orthonormalize};
use hhdl::{DenseMatrix, Error, HouseholderDictionary, Reflector};
use proptest::prelude::*;

fn random_reflectors(seed: u64, n: usize, m: usize) -> Vec<Reflector> {
    let mut rng = seeded_rng(seed);
    (0..m).map(|_| Reflector::new(random_unit_vector(&mut rng, n)).unwrap()).collect()
}

fn orthogonal_set(seed: u64, n: usize, m: usize) -> Vec<Reflector> {
    let cols = random_data(seed, n, m).columns();
    qr_orthonormalize(&cols)
        .unwrap()
        .into_iter()
        .map(|u| Reflector::new(u).unwrap())
        .collect()
}

#[test]
fn reflector_examples() {
    let e1 = Reflector::new(vec![1.0, 0.0, 0.0]).unwrap();
    assert_eq!(reflect_vector(&e1, &[1.0, 2.0, 3.0]).unwrap(), vec![-1.0, 2.0, 3.0]);
    let zero = Reflector::identity(3);
    assert!(zero.is_identity());
    assert_eq!(reflect_vector(&zero, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    let diag = Reflector::from_direction(&[1.0, 1.0]);
    let out = reflect_vector(&diag, &[1.0, 0.0]).unwrap();
    assert!((out[0]).abs() < 1e-15 && (out[1] + 1.0).abs() < 1e-15);
    assert!(matches!(Reflector::new(vec![0.5, 0.0]), Err(Error::Domain(_))));
    assert!(matches!(reflect_vector(&e1, &[1.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn left_and_right_reflection_match_dense() {
    let r = &random_reflectors(1, 9, 1)[0];
    let h = reflector_matrix(r.vector());
    let x = random_data(2, 9, 5);
    assert!(reflect_matrix_left(r, &x).unwrap().max_abs_diff(&naive_matmul(&h, &x)) < 1e-13);
    let w = random_data(3, 4, 9);
    assert!(reflect_matrix_right(&w, r).unwrap().max_abs_diff(&naive_matmul(&w, &h)) < 1e-13);
}

#[test]
fn apply_matches_dense_product() {
    for (seed, n, m) in [(10u64, 8usize, 3usize), (11, 16, 12), (12, 64, 20)] {
        let refl = random_reflectors(seed, n, m);
        let dict = HouseholderDictionary::new(n, refl.clone(), false).unwrap();
        let dense = dense_product(&refl, n);
        let x = random_data(seed + 100, n, 7);
        assert!(dict.apply(&x).unwrap().max_abs_diff(&naive_matmul(&dense, &x)) <= 1e-11);
        assert!(dict.apply_adjoint(&x).unwrap().max_abs_diff(&naive_matmul(&dense.transpose(), &x)) <= 1e-11);
        assert!(dict.to_dense().max_abs_diff(&dense) <= 1e-11);
        let back = dict.apply_adjoint(&dict.apply(&x).unwrap()).unwrap();
        assert!(back.max_abs_diff(&x) <= 1e-12);
    }
}

#[test]
fn orthogonal_set_closed_form() {
    let refl = orthogonal_set(20, 10, 4);
    let dict = HouseholderDictionary::new(10, refl.clone(), true).unwrap();
    let closed = dict.to_dense();
    assert!(closed.max_abs_diff(&dense_product(&refl, 10)) < 1e-13);
    assert_eq!(closed.max_asymmetry(), 0.0);
    // Reflector order is irrelevant for orthogonal sets.
    let mut reversed = refl.clone();
    reversed.reverse();
    assert!(dense_product(&reversed, 10).max_abs_diff(&closed) < 1e-13);
    assert!(HouseholderDictionary::new(10, random_reflectors(21, 10, 3), true).is_err());
}

#[test]
fn full_orthogonal_set_is_minus_identity() {
    let refl = orthogonal_set(22, 6, 6);
    let dict = HouseholderDictionary::new(6, refl, true).unwrap();
    let minus = DenseMatrix::identity(6).scale(-1.0);
    assert!(dict.to_dense().max_abs_diff(&minus) < 1e-13);
}

#[test]
fn factorization_roundtrip() {
    for n in [1usize, 2, 8, 64] {
        let mut rng = seeded_rng(30 + n as u64);
        for _ in 0..20 {
            let q = random_orthonormal(&mut rng, n);
            let (dict, signs) = factorize_orthonormal(&q).unwrap();
            assert_eq!(dict.len(), n.saturating_sub(1));
            let rebuilt = naive_matmul(&dict.to_dense(), &signs.to_dense());
            assert!(rebuilt.max_abs_diff(&q) <= 1e-10, "n={n}");
            for (j, r) in dict.reflectors().iter().enumerate() {
                assert!(r.vector()[..j].iter().all(|&v| v == 0.0));
            }
            assert!(signs.signs().iter().all(|&s| s == 1.0 || s == -1.0));
        }
    }
}

#[test]
fn factorization_rejects_bad_input() {
    assert!(matches!(
        factorize_orthonormal(&DenseMatrix::zeros(2, 3)),
        Err(Error::DimensionMismatch { .. })
    ));
    let skew = DenseMatrix::new(2, 2, vec![1.0, 0.1, 0.0, 1.0]).unwrap();
    assert!(matches!(factorize_orthonormal(&skew), Err(Error::NotOrthonormal { .. })));
    let (dict, signs) = factorize_orthonormal(&DenseMatrix::identity(5)).unwrap();
    assert_eq!(dict.effective_len(), 0);
    assert!(signs.signs().iter().all(|&s| s == 1.0));
}

#[test]
fn triangularization_reproduces_leading_columns() {
    let y = random_data(40, 12, 60);
    let m = 4;
    let basis = economy_svd(&y, m + 1).unwrap().u;
    let refl = triangularize_basis(&basis, m).unwrap();
    assert_eq!(refl.len(), m);
    let dict = HouseholderDictionary::new(12, refl, false).unwrap();
    let t = dict.apply_adjoint(&basis).unwrap();
    for j in 0..m {
        for i in j + 1..12 {
            assert!(t[(i, j)].abs() < 1e-12, "entry ({i},{j}) = {}", t[(i, j)]);
        }
        assert!((t[(j, j)].abs() - 1.0).abs() < 1e-12);
    }
    // Uᵀ q_j = ±e_j, so the leading columns of U are ±q_j.
    let u = dict.to_dense();
    for j in 0..m {
        let dotp: f64 = (0..12).map(|i| u[(i, j)] * basis[(i, j)]).sum();
        assert!((dotp.abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn apply_cost_is_four_n_m() {
    for (n, m) in [(64usize, 1usize), (64, 12), (16, 5), (3, 3)] {
        let dict = HouseholderDictionary::new(n, random_reflectors(50, n, m), false).unwrap();
        assert_eq!(measure_apply_cost(&dict, 4).unwrap(), (4 * n * m) as u64);
    }
    let mut counter = OpCounter::default();
    let dict = HouseholderDictionary::new(8, random_reflectors(51, 8, 2), false).unwrap();
    dict.apply_in_place(&mut random_data(52, 8, 10), &mut counter);
    assert_eq!(counter.ops, 4 * 8 * 2 * 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_dictionary_is_orthonormal(seed in any::<u64>(), n in 1usize..24, m in 0usize..30) {
        let dict = HouseholderDictionary::new(n, random_reflectors(seed, n, m), false).unwrap();
        prop_assert!(dict.to_dense().orthonormality_deviation() < 1e-12);
    }

    #[test]
    fn prop_reflector_involution(seed in any::<u64>(), n in 1usize..32) {
        let r = &random_reflectors(seed, n, 1)[0];
        let x = random_data(seed ^ 1, n, 1).column(0);
        let twice = reflect_vector(r, &reflect_vector(r, &x).unwrap()).unwrap();
        let diff = twice.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-13 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max)));
    }

    #[test]
    fn prop_factorization(seed in any::<u64>(), n in 1usize..16) {
        let q = random_orthonormal(&mut seeded_rng(seed), n);
        let (dict, signs) = factorize_orthonormal(&q).unwrap();
        let rebuilt = naive_matmul(&dict.to_dense(), &signs.to_dense());
        prop_assert!(rebuilt.max_abs_diff(&q) < 1e-10);
    }
}
