use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::learning::Dictionary;
use crate::linalg::matrix::DenseMatrix;
use crate::linalg::random::seeded_rng;
use crate::sparse::{omp_cholesky_masked, OmpSolution};

use super::patches::{patch_pixels, to_pixel, PATCH_DIM, PATCH_EDGE};
use super::pgm::GrayImage;

/// Restricted atoms with norm at or below this are never selected.
pub const ATOM_NORM_TOL: f64 = 1e-10;

/// Per-pixel observation flags, row-major; `true` means observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    observed: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: usize, height: usize, observed: Vec<bool>) -> Result<Self> {
        if observed.len() != width * height {
            return Err(Error::dims(format!("{} flags", width * height), format!("{}", observed.len())));
        }
        Ok(Self {
            width,
            height,
            observed,
        })
    }

    pub fn all_observed(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            observed: vec![true; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn missing(&self) -> Vec<bool> {
        self.observed.iter().map(|o| !o).collect()
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    pub fn observed_fraction(&self) -> f64 {
        self.observed_count() as f64 / self.observed.len() as f64
    }
}

/// Blanks `round(fraction · W · H)` pixels chosen uniformly without
/// replacement from a seeded generator.
pub fn corrupt(image: &GrayImage, fraction: f64, seed: u64) -> Result<(GrayImage, PixelMask)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Domain(format!("missing fraction {fraction} outside [0, 1)")));
    }
    let total = image.width() * image.height();
    let count = (fraction * total as f64).round() as usize;
    let mut rng = seeded_rng(seed);
    let mut observed = vec![true; total];
    let mut out = image.clone();
    for idx in sample(&mut rng, total, count).iter() {
        observed[idx] = false;
        out.pixels_mut()[idx] = 0;
    }
    Ok((out, PixelMask::new(image.width(), image.height(), observed)?))
}

#[derive(Debug, Clone)]
pub struct InpaintResult {
    pub image: GrayImage,
    /// Patches that had missing pixels.
    pub patches_filled: usize,
    /// Patches with fewer than `s` observed pixels, filled with the mean.
    pub fallback_patches: usize,
    /// Patches where OMP stopped early on a singular restricted Gram matrix.
    pub breakdown_patches: usize,
}

/// Reconstructs missing pixels patch by patch: sparse-code the observed
/// pixels against the renormalized restricted atoms, then synthesize the
/// missing ones from the full atoms. Observed pixels are copied unchanged.
pub fn inpaint(corrupted: &GrayImage, mask: &PixelMask, d: &Dictionary, s: usize) -> Result<InpaintResult> {
    if d.dim() != PATCH_DIM {
        return Err(Error::dims(format!("dictionary of dimension {PATCH_DIM}"), format!("{}", d.dim())));
    }
    if (mask.width(), mask.height()) != (corrupted.width(), corrupted.height()) {
        return Err(Error::dims(
            format!("{}x{} mask", corrupted.width(), corrupted.height()),
            format!("{}x{}", mask.width(), mask.height()),
        ));
    }
    if s == 0 || s > PATCH_DIM {
        return Err(Error::Domain(format!("sparsity {s} out of range 1..={PATCH_DIM}")));
    }
    if corrupted.width() % PATCH_EDGE != 0 || corrupted.height() % PATCH_EDGE != 0 {
        return Err(Error::Domain("image sides must be multiples of the patch edge".into()));
    }
    let dense = d.to_dense();
    let observed_all: Vec<f64> = corrupted
        .pixels()
        .iter()
        .zip(mask.observed())
        .filter(|(_, &o)| o)
        .map(|(&p, _)| f64::from(p))
        .collect();
    let global_mean = if observed_all.is_empty() {
        0.0
    } else {
        observed_all.iter().sum::<f64>() / observed_all.len() as f64
    };

    let width = corrupted.width();
    let grid_cols = width / PATCH_EDGE;
    let count = grid_cols * (corrupted.height() / PATCH_EDGE);
    let mut out = corrupted.clone();
    let mut result_counts = (0usize, 0usize, 0usize);
    for p in 0..count {
        let offsets: Vec<usize> = patch_pixels(width, grid_cols, p).collect();
        let seen: Vec<bool> = offsets.iter().map(|&o| mask.observed()[o]).collect();
        let rows: Vec<usize> = (0..PATCH_DIM).filter(|&i| seen[i]).collect();
        if rows.len() == PATCH_DIM {
            continue;
        }
        result_counts.0 += 1;
        let values: Vec<f64> = rows.iter().map(|&i| f64::from(corrupted.pixels()[offsets[i]])).collect();
        if rows.len() < s {
            let fill = if values.is_empty() {
                global_mean
            } else {
                values.iter().sum::<f64>() / values.len() as f64
            };
            for i in (0..PATCH_DIM).filter(|&i| !seen[i]) {
                out.pixels_mut()[offsets[i]] = to_pixel(fill);
            }
            result_counts.1 += 1;
            continue;
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let target: Vec<f64> = values.iter().map(|v| (v - mean) / 255.0).collect();
        let (restricted, norms) = restrict(&dense, &rows);
        let eligible: Vec<bool> = norms.iter().map(|&n| n > ATOM_NORM_TOL).collect();
        let solution: OmpSolution = omp_cholesky_masked(&restricted, &target, s, Some(&eligible))?;
        if solution.breakdown {
            result_counts.2 += 1;
        }
        for i in (0..PATCH_DIM).filter(|&i| !seen[i]) {
            let v: f64 = solution
                .support
                .iter()
                .zip(&solution.coefficients)
                .map(|(&k, &c)| c * dense[(i, k)] / norms[k])
                .sum();
            out.pixels_mut()[offsets[i]] = to_pixel(v * 255.0 + mean);
        }
    }
    Ok(InpaintResult {
        image: out,
        patches_filled: result_counts.0,
        fallback_patches: result_counts.1,
        breakdown_patches: result_counts.2,
    })
}

/// Rows `rows` of `dense` with unit-normalized columns, and the restricted
/// column norms. Columns with negligible norm are left at zero.
fn restrict(dense: &DenseMatrix, rows: &[usize]) -> (DenseMatrix, Vec<f64>) {
    let k = dense.cols();
    let mut out = DenseMatrix::from_fn(rows.len(), k, |i, j| dense[(rows[i], j)]);
    let norms: Vec<f64> = (0..k)
        .map(|j| (0..rows.len()).map(|i| out[(i, j)] * out[(i, j)]).sum::<f64>().sqrt())
        .collect();
    for (j, &norm) in norms.iter().enumerate() {
        let scale = if norm > ATOM_NORM_TOL { 1.0 / norm } else { 0.0 };
        for i in 0..rows.len() {
            out[(i, j)] *= scale;
        }
    }
    (out, norms)
}
