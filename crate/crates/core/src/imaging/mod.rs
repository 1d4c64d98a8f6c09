//! Grayscale image I/O, 8×8 patch datasets, reconstruction metrics, the DCT
//! baseline dictionary and missing-pixel reconstruction.

mod dct;
mod inpaint;
mod metrics;
mod patches;
mod pgm;

pub use dct::{dct_1d, dct_dictionary};
pub use inpaint::{corrupt, inpaint, InpaintResult, PixelMask, ATOM_NORM_TOL};
pub use metrics::{image_errors, image_errors_on, metrics_csv_header, rmse, ImageErrors, MetricsRow};
pub use patches::{center_crop, concat_patches, depatchify, patchify, PatchDataset, PATCH_DIM, PATCH_EDGE};
pub use pgm::{load_pgm, parse_pgm, save_pgm, write_pgm, GrayImage};
