use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::patches::{center_crop, PATCH_EDGE};

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::dims(format!("{} pixels", width * height), format!("{}", pixels.len())));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    /// Pixel at `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }
}

/// Parses a binary (P5) PGM with maxval 255. No cropping.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| Error::Format("non-ASCII PGM header".into()))?);
    }
    if fields[0] != "P5" {
        return Err(Error::Format(format!("expected binary PGM magic P5, found `{}`", fields[0])));
    }
    let number = |s: &str, what: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::Format(format!("bad PGM {what} `{s}`")))
    };
    let width = number(fields[1], "width")?;
    let height = number(fields[2], "height")?;
    let maxval = number(fields[3], "maxval")?;
    if maxval != 255 {
        return Err(Error::Format(format!("maxval {maxval} is not supported (need 255)")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format("PGM has zero size".into()));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Format("missing whitespace after PGM header".into()));
    }
    pos += 1;
    let payload = &bytes[pos..];
    if payload.len() < width * height {
        return Err(Error::Format(format!(
            "PGM payload has {} bytes, expected {}",
            payload.len(),
            width * height
        )));
    }
    GrayImage::new(width, height, payload[..width * height].to_vec())
}

/// Reads a P5 PGM and center-crops it to multiples of the patch edge.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let image = parse_pgm(&bytes)?;
    if image.width() % PATCH_EDGE != 0 || image.height() % PATCH_EDGE != 0 {
        let cropped = center_crop(&image, PATCH_EDGE)?;
        log::warn!(
            "{}: {}x{} is not a multiple of {PATCH_EDGE}; center-cropped to {}x{}",
            path.display(),
            image.width(),
            image.height(),
            cropped.width(),
            cropped.height()
        );
        return Ok(cropped);
    }
    Ok(image)
}

/// Encodes `image` as a P5 PGM.
pub fn write_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.pixels());
    out
}

pub fn save_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_pgm(image)).map_err(|e| Error::io(path, e))
}
