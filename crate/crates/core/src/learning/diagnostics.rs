use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::eigen::{sym_eig, sym_eig_smallest};
use crate::linalg::matrix::DenseMatrix;
use crate::linalg::svd::nuclear_norm;
use crate::sparse::SparseCodeMatrix;

use super::Dictionary;

/// Margins at or above this count as diagonally dominant.
pub const GERSHGORIN_TOL: f64 = 1e-10;
/// `λ_min ≥ −PSD_TOL` counts as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GershgorinReport {
    pub diagonally_dominant_psd: bool,
    /// `R_jj − Σ_{i≠j} |R_sym,ij|` per row of the symmetric part.
    pub margins: Vec<f64>,
}

impl GershgorinReport {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Gershgorin margins of the symmetric part of a square `r`.
    pub fn from_matrix(r: &DenseMatrix) -> Result<Self> {
        if !r.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", r.rows(), r.cols())));
        }
        let n = r.rows();
        let margins: Vec<f64> = (0..n)
            .map(|j| {
                let off: f64 = (0..n)
                    .filter(|&i| i != j)
                    .map(|i| (0.5 * (r[(j, i)] + r[(i, j)])).abs())
                    .sum();
                r[(j, j)] - off
            })
            .collect();
        Ok(Self {
            diagonally_dominant_psd: margins.iter().all(|&m| m >= -GERSHGORIN_TOL),
            margins,
        })
    }
}

/// `R = X (DᵀY)ᵀ`; diagonal dominance of its symmetric part certifies that
/// no orthonormal rotation of `D` reduces the objective.
pub fn gershgorin_check(y: &DenseMatrix, d: &Dictionary, x: &SparseCodeMatrix) -> Result<GershgorinReport> {
    GershgorinReport::from_matrix(&code_correlation(y, d, x)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinReport {
    pub nuclear_norm: f64,
    /// `tr(Dᵀ Y Xᵀ)`, which equals `‖X‖_F²` when `X = T_s(DᵀY)`.
    pub trace: f64,
    pub nuclear_gap: f64,
}

/// Gap between `‖YXᵀ‖_*` and `tr(DᵀYXᵀ)`. Zero exactly when `D` is a
/// Procrustes maximizer for these codes.
pub fn local_min_check(y: &DenseMatrix, d: &Dictionary, x: &SparseCodeMatrix) -> Result<LocalMinReport> {
    let r = code_correlation(y, d, x)?;
    let trace = r.trace();
    let nuclear = nuclear_norm(&x.mul_dense_t(y)?)?;
    Ok(LocalMinReport {
        nuclear_norm: nuclear,
        trace,
        nuclear_gap: nuclear - trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectorPsdReport {
    pub psd: bool,
    pub lambda_min: f64,
}

/// Smallest eigenvalue of `Z₁ = DXYᵀ + Y(DX)ᵀ`. When it is nonnegative no
/// single reflector prepended to `D` lowers the objective for these codes.
pub fn reflector_psd_check(y: &DenseMatrix, d: &DenseMatrix, x: &SparseCodeMatrix) -> Result<ReflectorPsdReport> {
    if d.rows() != y.rows() || !d.is_square() || x.rows() != d.cols() || x.cols() != y.cols() {
        return Err(Error::dims(
            format!("{}x{} dictionary with {}x{} codes", y.rows(), y.rows(), y.rows(), y.cols()),
            format!("{}x{} dictionary with {}x{} codes", d.rows(), d.cols(), x.rows(), x.cols()),
        ));
    }
    let dx = x.left_mul_dense(d)?;
    let z = dx.matmul_nt(y)?.symmetrize_sum();
    let lambda_min = sym_eig_smallest(&z, 1)?.values[0];
    Ok(ReflectorPsdReport {
        psd: lambda_min >= -PSD_TOL,
        lambda_min,
    })
}

/// Eigenvalues normalized by the largest magnitude, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub scale: f64,
    /// The input was the zero matrix; `values` are all zero and unscaled.
    pub zero_matrix: bool,
}

impl Spectrum {
    /// Eigenvalues strictly below `-threshold` after normalization.
    pub fn count_below(&self, threshold: f64) -> usize {
        self.values.iter().filter(|&&v| v < -threshold).count()
    }

    /// `index,normalized_eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,normalized_eigenvalue\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{i},{v:.17e}");
        }
        out
    }
}

pub fn spectrum_report(z: &DenseMatrix) -> Result<Spectrum> {
    let eig = sym_eig(z)?;
    let scale = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let zero_matrix = scale == 0.0;
    let values = eig
        .values
        .iter()
        .rev()
        .map(|v| if zero_matrix { 0.0 } else { v / scale })
        .collect();
    Ok(Spectrum {
        values,
        scale,
        zero_matrix,
    })
}

fn code_correlation(y: &DenseMatrix, d: &Dictionary, x: &SparseCodeMatrix) -> Result<DenseMatrix> {
    if x.rows() != d.dim() || x.cols() != y.cols() {
        return Err(Error::dims(
            format!("{}x{} codes", d.dim(), y.cols()),
            format!("{}x{}", x.rows(), x.cols()),
        ));
    }
    x.mul_dense_t(&d.apply_adjoint(y)?)
}
