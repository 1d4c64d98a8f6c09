//! Dense real linear algebra sized for the small square problems that come
//! up here (n ≤ 256) and wide data matrices.

pub mod eigen;
pub mod matrix;
pub mod pca;
pub mod qr;
pub mod random;
pub mod svd;

pub use eigen::{sym_eig, sym_eig_smallest, EigenPairs};
pub use matrix::{dot, norm2, DenseMatrix};
pub use pca::partial_principal_components;
pub use qr::qr_orthonormalize;
pub use svd::{economy_svd, nuclear_norm, procrustes, singular_values, Svd};
