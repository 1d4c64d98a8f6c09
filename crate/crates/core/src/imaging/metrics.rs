use crate::error::{Error, Result};
use crate::learning::{objective, Dictionary};
use crate::linalg::matrix::DenseMatrix;
use crate::sparse::SparseCodeMatrix;

use super::pgm::GrayImage;

/// `‖Y − D X‖_F / √(nN)` on the normalized patch domain.
pub fn rmse(y: &DenseMatrix, d: &Dictionary, x: &SparseCodeMatrix) -> Result<f64> {
    let count = (y.rows() * y.cols()) as f64;
    if count == 0.0 {
        return Err(Error::Domain("empty dataset".into()));
    }
    Ok((objective(y, d, x)? / count).sqrt())
}

/// Pixel errors on the `[0, 1]` intensity scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageErrors {
    pub mae: f64,
    pub mse: f64,
    pub pixels: usize,
}

pub fn image_errors(reference: &GrayImage, estimate: &GrayImage) -> Result<ImageErrors> {
    image_errors_on(reference, estimate, None)
}

/// Errors restricted to pixels where `select` is true.
pub fn image_errors_on(reference: &GrayImage, estimate: &GrayImage, select: Option<&[bool]>) -> Result<ImageErrors> {
    if (reference.width(), reference.height()) != (estimate.width(), estimate.height()) {
        return Err(Error::dims(
            format!("{}x{} image", reference.width(), reference.height()),
            format!("{}x{}", estimate.width(), estimate.height()),
        ));
    }
    if let Some(sel) = select {
        if sel.len() != reference.pixels().len() {
            return Err(Error::dims(format!("{} mask entries", reference.pixels().len()), format!("{}", sel.len())));
        }
    }
    let (mut abs, mut sq, mut count) = (0.0, 0.0, 0usize);
    for (i, (&a, &b)) in reference.pixels().iter().zip(estimate.pixels()).enumerate() {
        if select.map_or(true, |s| s[i]) {
            let e = (f64::from(a) - f64::from(b)) / 255.0;
            abs += e.abs();
            sq += e * e;
            count += 1;
        }
    }
    if count == 0 {
        return Ok(ImageErrors {
            mae: 0.0,
            mse: 0.0,
            pixels: 0,
        });
    }
    Ok(ImageErrors {
        mae: abs / count as f64,
        mse: sq / count as f64,
        pixels: count,
    })
}

/// One line of the metrics CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub image: String,
    pub method: String,
    pub m: Option<usize>,
    pub s: usize,
    pub rmse: Option<f64>,
    pub mae: f64,
    pub mse: f64,
}

pub fn metrics_csv_header() -> &'static str {
    "image,method,m,s,rmse,mae,mse"
}

impl MetricsRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{:.17e},{:.17e}",
            self.image,
            self.method,
            opt(self.m.map(|m| m.to_string())),
            self.s,
            opt(self.rmse.map(|r| format!("{r:.17e}"))),
            self.mae,
            self.mse
        )
    }
}
