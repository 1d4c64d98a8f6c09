//! Orthonormal sparsifying dictionaries built from products of Householder
//! reflectors: training, fast application, sparse coding, image patch
//! pipelines and operation-count models.

pub mod complexity;
pub mod error;
pub mod formats;
pub mod householder;
pub mod imaging;
pub mod learning;
pub mod linalg;
pub mod sparse;

pub use error::{Error, Result};
pub use householder::{HouseholderDictionary, Reflector, SignDiagonal};
pub use learning::{train, Dictionary, LearnedDictionary, TrainConfig, TrainOutcome, TrainReport, Variant};
pub use linalg::DenseMatrix;
pub use sparse::SparseCodeMatrix;
