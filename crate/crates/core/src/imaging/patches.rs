use crate::error::{Error, Result};
use crate::linalg::matrix::DenseMatrix;

use super::pgm::GrayImage;

pub const PATCH_EDGE: usize = 8;
pub const PATCH_DIM: usize = PATCH_EDGE * PATCH_EDGE;

/// Non-overlapping 8×8 patches as columns, mean-removed and divided by 255.
/// Within a patch, pixel `(r, c)` is row `c·8 + r`; patches are numbered in
/// row-major grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchDataset {
    pub y: DenseMatrix,
    /// Per-patch means in pixel units.
    pub means: Vec<f64>,
    pub grid_rows: usize,
    pub grid_cols: usize,
}

impl PatchDataset {
    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn width(&self) -> usize {
        self.grid_cols * PATCH_EDGE
    }

    pub fn height(&self) -> usize {
        self.grid_rows * PATCH_EDGE
    }
}

/// Pixel offsets of patch `p`, in patch-vector order.
pub(crate) fn patch_pixels(width: usize, grid_cols: usize, p: usize) -> impl Iterator<Item = usize> {
    let (pr, pc) = (p / grid_cols, p % grid_cols);
    (0..PATCH_DIM).map(move |i| {
        let (c, r) = (i / PATCH_EDGE, i % PATCH_EDGE);
        (pr * PATCH_EDGE + r) * width + pc * PATCH_EDGE + c
    })
}

fn check_geometry(image: &GrayImage) -> Result<()> {
    if image.width() % PATCH_EDGE != 0 || image.height() % PATCH_EDGE != 0 || image.width() == 0 || image.height() == 0 {
        return Err(Error::Domain(format!(
            "image {}x{} is not a positive multiple of {PATCH_EDGE}",
            image.width(),
            image.height()
        )));
    }
    Ok(())
}

pub fn patchify(image: &GrayImage) -> Result<PatchDataset> {
    check_geometry(image)?;
    let grid_rows = image.height() / PATCH_EDGE;
    let grid_cols = image.width() / PATCH_EDGE;
    let count = grid_rows * grid_cols;
    let mut y = DenseMatrix::zeros(PATCH_DIM, count);
    let mut means = Vec::with_capacity(count);
    let pixels = image.pixels();
    let mut buf = [0.0f64; PATCH_DIM];
    for p in 0..count {
        for (slot, offset) in buf.iter_mut().zip(patch_pixels(image.width(), grid_cols, p)) {
            *slot = f64::from(pixels[offset]);
        }
        let mean = buf.iter().sum::<f64>() / PATCH_DIM as f64;
        for (i, v) in buf.iter().enumerate() {
            y[(i, p)] = (v - mean) / 255.0;
        }
        means.push(mean);
    }
    Ok(PatchDataset {
        y,
        means,
        grid_rows,
        grid_cols,
    })
}

/// Rebuilds an image from (approximate) normalized patches `approx` with
/// the geometry and means of `dataset`, rounding and clamping to `[0, 255]`.
pub fn depatchify(dataset: &PatchDataset, approx: &DenseMatrix) -> Result<GrayImage> {
    if approx.shape() != (PATCH_DIM, dataset.len()) {
        return Err(Error::Domain(format!(
            "patch matrix {}x{} does not match the {PATCH_DIM}x{} geometry",
            approx.rows(),
            approx.cols(),
            dataset.len()
        )));
    }
    let width = dataset.width();
    let mut image = GrayImage::filled(width, dataset.height(), 0);
    let pixels = image.pixels_mut();
    for (p, mean) in dataset.means.iter().enumerate() {
        for (i, offset) in patch_pixels(width, dataset.grid_cols, p).enumerate() {
            pixels[offset] = to_pixel(approx[(i, p)] * 255.0 + mean);
        }
    }
    Ok(image)
}

pub(crate) fn to_pixel(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Patches of several images concatenated column-wise.
pub fn concat_patches(images: &[GrayImage]) -> Result<DenseMatrix> {
    let sets = images.iter().map(patchify).collect::<Result<Vec<_>>>()?;
    let total: usize = sets.iter().map(PatchDataset::len).sum();
    let mut y = DenseMatrix::zeros(PATCH_DIM, total);
    let mut offset = 0;
    for set in &sets {
        for i in 0..PATCH_DIM {
            y.row_mut(i)[offset..offset + set.len()].copy_from_slice(set.y.row(i));
        }
        offset += set.len();
    }
    Ok(y)
}

/// Largest centered sub-image whose sides are multiples of `edge`.
pub fn center_crop(image: &GrayImage, edge: usize) -> Result<GrayImage> {
    let width = image.width() / edge * edge;
    let height = image.height() / edge * edge;
    if width == 0 || height == 0 {
        return Err(Error::Domain(format!(
            "image {}x{} is smaller than one {edge}x{edge} patch",
            image.width(),
            image.height()
        )));
    }
    let left = (image.width() - width) / 2;
    let top = (image.height() - height) / 2;
    Ok(GrayImage::from_fn(width, height, |r, c| image.get(top + r, left + c)))
}
