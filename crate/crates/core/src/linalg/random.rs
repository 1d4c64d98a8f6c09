use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::matrix::DenseMatrix;
use crate::linalg::qr::orthonormalize_completing;

/// The generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn gaussian_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| StandardNormal.sample(&mut *rng)).collect();
    DenseMatrix::from_raw(rows, cols, data)
}

pub fn random_unit_vector(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = crate::linalg::matrix::norm2(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Orthonormal `n × n` matrix from Gram-Schmidt on Gaussian columns.
pub fn random_orthonormal(rng: &mut SeededRng, n: usize) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vector(rng, n)).collect();
    let q = orthonormalize_completing(&cols, n);
    DenseMatrix::from_columns(&q).expect("finite")
}
