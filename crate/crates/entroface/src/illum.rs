//! Illumination normalization in the logarithm domain.
//!
//! Multiplicative lighting (a gain field over the scene) becomes additive
//! after a log transform, and slowly varying additive structure concentrates
//! in the lowest-frequency DCT coefficients. The pipeline therefore runs:
//! log transform → variance equalization → full-image DCT → zero the first
//! `k` AC coefficients in zig-zag order and rewrite the DC term → inverse
//! DCT. What survives is the reflectance-like detail of the image.

use serde::{Deserialize, Serialize};

use crate::dct::{self, CoefficientGrid};
use crate::error::{Error, Result};
use crate::image::GrayImage;

/// What the DC coefficient is rewritten to during suppression, expressed as
/// the target mean of the reconstructed image.
///
/// `Fixed` pins every normalized image to one shared mean, which makes the
/// output invariant to a global gain on the input (the gain lands entirely
/// in the DC term after the log, and rewriting DC to a constant discards
/// it). `InputLogMean` instead uses the mean of the image's own log
/// transform; the output then tracks each input's overall level, which keeps
/// per-image brightness but re-admits gain differences between images. A
/// per-image target cannot cancel a gain `c`: the log means of `c·I` and `I`
/// differ by exactly `ln c`, so their outputs differ by that constant.
/// `Fixed` is the default for exactly that reason.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DcTarget {
    /// Reconstructed mean is this constant. The default uses ln(128), a
    /// mid-gray in the log domain; any shared constant works equally well.
    Fixed(f64),
    /// Reconstructed mean equals the mean of the log-transformed input.
    InputLogMean,
}

/// Mean of the log-domain mid-gray: ln(128).
pub const DEFAULT_DC_TARGET: f64 = 4.852030263919617;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlluminationParams {
    /// Zero-pixel guard: pixels are logged as `ln(max(p, epsilon))`.
    pub epsilon: f64,
    /// Number of gray levels L for variance equalization (bin count and
    /// output range [0, L−1]).
    pub gray_levels: usize,
    /// How many low-frequency AC coefficients to zero, in zig-zag order
    /// (positions 1..=k; DC is handled by `dc_target`).
    pub suppress_count: usize,
    /// Set false to bypass variance equalization (useful for isolating the
    /// suppression stage, e.g. when checking gain invariance).
    pub equalize: bool,
    pub dc_target: DcTarget,
}

impl Default for IlluminationParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            gray_levels: 256,
            suppress_count: 3,
            equalize: true,
            dc_target: DcTarget::Fixed(DEFAULT_DC_TARGET),
        }
    }
}

impl IlluminationParams {
    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::invalid("epsilon must be positive"));
        }
        if self.gray_levels == 0 {
            return Err(Error::invalid("gray_levels must be positive"));
        }
        Ok(())
    }
}

/// Natural log of each pixel, guarding zeros: `p → ln(max(p, epsilon))`.
/// Applying the guard inside the log (rather than only to exact zeros) keeps
/// the map monotone.
pub fn log_transform(img: &GrayImage, epsilon: f64) -> Result<GrayImage> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if let Some(&p) = img.pixels().iter().find(|&&p| p < 0.0) {
        return Err(Error::invalid(format!("negative input pixel {p}")));
    }
    Ok(img.map(|p| p.max(epsilon).ln()))
}

/// Histogram-based contrast normalization: bin intensities into L levels
/// over [min, max], map each pixel to the cumulative count of its bin
/// divided by the image standard deviation, then affinely rescale the
/// result to [0, L−1]. Monotone non-decreasing in the input intensity.
/// (The σ division cancels in the rescale but is kept as specified — the
/// stated formula is cumulative-count / σ.)
pub fn variance_equalize(img: &GrayImage, gray_levels: usize) -> Result<GrayImage> {
    if gray_levels == 0 {
        return Err(Error::invalid("gray_levels must be positive"));
    }
    let sigma = img.std_dev();
    if sigma <= 0.0 {
        return Err(Error::DegenerateContrast);
    }
    let lo = img.pixels().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = img.pixels().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bin_width = (hi - lo) / gray_levels as f64;
    let bin_of = |p: f64| -> usize {
        (((p - lo) / bin_width) as usize).min(gray_levels - 1)
    };

    let mut histogram = vec![0u64; gray_levels];
    for &p in img.pixels() {
        histogram[bin_of(p)] += 1;
    }
    let mut cumulative = histogram;
    for i in 1..cumulative.len() {
        cumulative[i] += cumulative[i - 1];
    }

    let v: Vec<f64> = img
        .pixels()
        .iter()
        .map(|&p| cumulative[bin_of(p)] as f64 / sigma)
        .collect();
    let v_lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let v_hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = v_hi - v_lo;
    let out: Vec<f64> = if span > 0.0 {
        let scale = (gray_levels - 1) as f64 / span;
        v.iter().map(|&x| (x - v_lo) * scale).collect()
    } else {
        // All pixels share one bin (only possible when L is small); the
        // target range [0, L−1] collapses to a point.
        vec![0.0; v.len()]
    };
    GrayImage::new(img.width(), img.height(), out, img.depth())
}

/// Zero the `k` lowest-frequency AC coefficients (zig-zag positions 1..=k)
/// and set the DC term so the reconstruction's mean equals `mu` — under the
/// orthonormal convention, DC = mu·√(M·N).
pub fn suppress_low_freq(coeffs: &CoefficientGrid, k: usize, mu: f64) -> Result<CoefficientGrid> {
    let total = coeffs.width() * coeffs.height();
    if k >= total {
        return Err(Error::invalid(format!(
            "suppress_count {k} out of range for {} coefficients",
            total
        )));
    }
    let order = dct::zigzag_order_rect(coeffs.height(), coeffs.width());
    let mut out = coeffs.clone();
    for &(u, v) in order.iter().skip(1).take(k) {
        out.set(u, v, 0.0);
    }
    out.set(0, 0, mu * (total as f64).sqrt());
    Ok(out)
}

/// The full normalization: log transform, optional variance equalization,
/// global DCT, low-frequency suppression with DC rewrite, inverse DCT.
/// Output dimensions and depth match the input.
pub fn normalize_illumination(img: &GrayImage, params: &IlluminationParams) -> Result<GrayImage> {
    params.validate()?;
    let logged = log_transform(img, params.epsilon)?;
    let mu = match params.dc_target {
        DcTarget::Fixed(value) => value,
        DcTarget::InputLogMean => logged.mean(),
    };
    let working = if params.equalize {
        variance_equalize(&logged, params.gray_levels)?
    } else {
        logged
    };
    let grid = dct::dct2(&working);
    let suppressed = suppress_low_freq(&grid, params.suppress_count, mu)?;
    let restored = dct::idct2(&suppressed);
    GrayImage::new(
        img.width(),
        img.height(),
        restored.pixels().to_vec(),
        img.depth(),
    )
}
