//! Orthonormal 2D DCT-II / inverse DCT, zig-zag coefficient ordering, and
//! JPEG quality-factor quantization.
//!
//! The transform uses the orthonormal convention: basis row `u` of length `n`
//! is `s(u)·cos(π(2x+1)u/(2n))` with `s(0) = √(1/n)` and `s(u) = √(2/n)`
//! otherwise. Under this scaling the inverse is the exact transpose pair and
//! Parseval's identity holds, so energy bookkeeping downstream (entropy maps,
//! DC/mean conversions) stays simple: the DC coefficient of an M×N image is
//! `mean · √(M·N)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// DCT coefficients of an image or block. Row-major like [`GrayImage`];
/// index `(u, v)` means row `u` (vertical frequency), column `v` (horizontal
/// frequency), with `(0, 0)` the DC term.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    width: usize,
    height: usize,
    coeffs: Vec<f64>,
}

impl CoefficientGrid {
    pub fn new(width: usize, height: usize, coeffs: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("coefficient grid dimensions must be positive"));
        }
        if coeffs.len() != width * height {
            return Err(Error::invalid(format!(
                "coefficient count mismatch: expected {} ({}x{}), got {}",
                width * height,
                width,
                height,
                coeffs.len()
            )));
        }
        Ok(Self {
            width,
            height,
            coeffs,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            coeffs: vec![0.0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient at vertical frequency `u`, horizontal frequency `v`.
    pub fn get(&self, u: usize, v: usize) -> f64 {
        debug_assert!(u < self.height && v < self.width);
        self.coeffs[u * self.width + v]
    }

    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        debug_assert!(u < self.height && v < self.width);
        self.coeffs[u * self.width + v] = value;
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Orthonormal DCT-II basis: row `u`, column `x` holds
/// `s(u)·cos(π(2x+1)u/(2n))`.
fn basis(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for u in 0..n {
        let s = if u == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for x in 0..n {
            m[(u, x)] = s * (std::f64::consts::PI * (2 * x + 1) as f64 * u as f64 / (2 * n) as f64).cos();
        }
    }
    m
}

/// Forward orthonormal 2D DCT-II of an image of any rectangular size.
pub fn dct2(img: &GrayImage) -> CoefficientGrid {
    let (w, h) = (img.width(), img.height());
    let p = DMatrix::from_row_slice(h, w, img.pixels());
    let d = basis(h) * p * basis(w).transpose();
    CoefficientGrid {
        width: w,
        height: h,
        coeffs: d.transpose().as_slice().to_vec(),
    }
}

/// Inverse of [`dct2`]. The returned image carries a nominal depth of 255;
/// callers reconstructing real images restamp the depth they care about.
pub fn idct2(coeffs: &CoefficientGrid) -> GrayImage {
    let (w, h) = (coeffs.width, coeffs.height);
    let d = DMatrix::from_row_slice(h, w, &coeffs.coeffs);
    let p = basis(h).transpose() * d * basis(w);
    GrayImage::new(w, h, p.transpose().as_slice().to_vec(), 255.0)
        .expect("dimensions preserved by the transform")
}

/// Standard JPEG zig-zag traversal of an `n`×`n` grid, as `(u, v)` pairs with
/// `(0, 0)` first.
pub fn zigzag_order(n: usize) -> Vec<(usize, usize)> {
    zigzag_order_rect(n, n)
}

/// Zig-zag traversal generalized to a `rows`×`cols` grid: anti-diagonals
/// `u + v = s` in increasing `s`; odd diagonals walk `u` ascending
/// (down-left), even diagonals walk `u` descending (up-right), matching the
/// square JPEG order when `rows == cols`.
pub fn zigzag_order_rect(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(rows * cols);
    for s in 0..rows + cols - 1 {
        let lo = s.saturating_sub(cols - 1);
        let hi = s.min(rows - 1);
        if s % 2 == 1 {
            for u in lo..=hi {
                order.push((u, s - u));
            }
        } else {
            for u in (lo..=hi).rev() {
                order.push((u, s - u));
            }
        }
    }
    order
}

/// The standard JPEG luminance quantization table (the usual 8×8 base table),
/// row-major with `[u][v]` indexing like [`CoefficientGrid`].
pub const BASE_LUMINANCE_TABLE: [[u16; 8]; 8] = [
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
];

/// The base luminance table scaled to a quality factor, entries in [1, 255].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizationMatrix {
    entries: [[u16; 8]; 8],
    quality: u8,
}

impl QuantizationMatrix {
    pub fn get(&self, u: usize, v: usize) -> u16 {
        self.entries[u][v]
    }

    pub fn quality(&self) -> u8 {
        self.quality
    }
}

/// Scale the base luminance table to `quality` ∈ 1..=100 with the standard
/// JPEG rule: scale = 50/q below 50, 2 − q/50 at or above; each entry is
/// rounded and clamped to [1, 255].
pub fn scale_quant_matrix(quality: u8) -> Result<QuantizationMatrix> {
    if !(1..=100).contains(&quality) {
        return Err(Error::invalid(format!(
            "quality {quality} out of range 1..=100"
        )));
    }
    let q = quality as f64;
    let scale = if q < 50.0 { 50.0 / q } else { 2.0 - q / 50.0 };
    let mut entries = [[0u16; 8]; 8];
    for u in 0..8 {
        for v in 0..8 {
            entries[u][v] = (BASE_LUMINANCE_TABLE[u][v] as f64 * scale).round().clamp(1.0, 255.0) as u16;
        }
    }
    Ok(QuantizationMatrix { entries, quality })
}

/// Quantize–dequantize an 8×8 coefficient block:
/// `c → round(c / q) · q`, keeping values in coefficient units.
pub fn quantize_block(block: &CoefficientGrid, qm: &QuantizationMatrix) -> Result<CoefficientGrid> {
    if block.width != 8 || block.height != 8 {
        return Err(Error::invalid(format!(
            "quantize_block requires an 8x8 block, got {}x{}",
            block.width, block.height
        )));
    }
    let mut out = block.clone();
    for u in 0..8 {
        for v in 0..8 {
            let q = qm.entries[u][v] as f64;
            out.set(u, v, (block.get(u, v) / q).round() * q);
        }
    }
    Ok(out)
}
