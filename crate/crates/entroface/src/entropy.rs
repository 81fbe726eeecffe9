//! Entropy-guided selection of block-DCT coefficients.
//!
//! Each G×G block is DCT-transformed and JPEG-quantized; coefficient
//! magnitudes are normalized into per-block occurrence probabilities, every
//! position is scored with a binary entropy (Shannon or Rényi of order q),
//! and the block contributes the coefficient at the highest-scoring
//! position. One value per block, concatenated in raster block order, forms
//! the feature vector. Both scores peak at p = 0.5, so the selected
//! coefficient is the one that carries a balanced share of its block's
//! energy — neither the dominant DC-like term nor the noise floor.

use serde::{Deserialize, Serialize};

use crate::dct::{self, CoefficientGrid};
use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    Shannon,
    Renyi,
}

/// What value a block contributes at its selected position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureValue {
    /// The quantized DCT coefficient itself (default — downstream embedding
    /// works on image content).
    Coefficient,
    /// The entropy score at the selected position.
    EntropyScore,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyConfig {
    /// Block side length G. Quantization uses the standard 8×8 table and is
    /// skipped for any other G.
    pub block_size: usize,
    /// JPEG quality factor for the quantization step, 1..=100.
    pub quality: u8,
    pub measure: Measure,
    /// Rényi information order q (> 0, ≠ 1); consulted only for
    /// `Measure::Renyi`.
    pub renyi_order: f64,
    pub feature_value: FeatureValue,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self {
            block_size: 8,
            quality: 50,
            measure: Measure::Renyi,
            renyi_order: 2.0,
            feature_value: FeatureValue::Coefficient,
        }
    }
}

impl EntropyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(Error::invalid("block_size must be positive"));
        }
        if !(1..=100).contains(&self.quality) {
            return Err(Error::invalid(format!(
                "quality {} out of range 1..=100",
                self.quality
            )));
        }
        validate_renyi_order(self.renyi_order)?;
        Ok(())
    }
}

fn validate_renyi_order(q: f64) -> Result<()> {
    if !q.is_finite() || q <= 0.0 || q == 1.0 {
        return Err(Error::invalid(format!(
            "renyi order must be positive, finite and ≠ 1, got {q}"
        )));
    }
    Ok(())
}

/// One entropy-selected value per block, raster block order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub blocks_x: usize,
    pub blocks_y: usize,
    pub source_measure: Measure,
    /// Blocks that quantized to all zeros and contributed a 0 feature.
    pub degenerate_blocks: usize,
}

impl FeatureVector {
    pub fn block_count(&self) -> usize {
        self.blocks_x * self.blocks_y
    }
}

/// Crop the image to the largest G-multiple in each dimension and tile it
/// into G×G blocks, raster order.
pub fn block_partition(img: &GrayImage, block_size: usize) -> Result<Vec<GrayImage>> {
    if block_size == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    if block_size > img.width() || block_size > img.height() {
        return Err(Error::invalid(format!(
            "block size {} exceeds image dimensions {}x{}",
            block_size,
            img.width(),
            img.height()
        )));
    }
    let bx = img.width() / block_size;
    let by = img.height() / block_size;
    let mut blocks = Vec::with_capacity(bx * by);
    for y_block in 0..by {
        for x_block in 0..bx {
            let block = GrayImage::from_fn(block_size, block_size, img.depth(), |x, y| {
                img.get(x_block * block_size + x, y_block * block_size + y)
            });
            blocks.push(block);
        }
    }
    Ok(blocks)
}

/// Normalize coefficient magnitudes into a probability per position:
/// p(i) = |c(i)| / Σ|c|. Errors on an all-zero grid.
pub fn coefficient_probabilities(coeffs: &CoefficientGrid) -> Result<Vec<f64>> {
    let total: f64 = coeffs.coeffs().iter().map(|c| c.abs()).sum();
    if total == 0.0 {
        return Err(Error::DegenerateBlock);
    }
    Ok(coeffs.coeffs().iter().map(|c| c.abs() / total).collect())
}

/// Binary Shannon entropy of `p`: −[p·ln p + (1−p)·ln(1−p)], 0·ln 0 := 0.
pub fn binary_shannon(p: f64) -> f64 {
    let mut e = 0.0;
    if p > 0.0 {
        e -= p * p.ln();
    }
    if p < 1.0 {
        e -= (1.0 - p) * (1.0 - p).ln();
    }
    e
}

/// Binary Rényi entropy of order `q`: (1/(1−q))·ln(p^q + (1−p)^q).
pub fn binary_renyi(p: f64, q: f64) -> f64 {
    (p.powf(q) + (1.0 - p).powf(q)).ln() / (1.0 - q)
}

/// Shannon entropy at every position of a probability grid.
pub fn shannon_map(probabilities: &[f64]) -> Result<Vec<f64>> {
    check_probabilities(probabilities)?;
    Ok(probabilities.iter().map(|&p| binary_shannon(p)).collect())
}

/// Rényi entropy of order `q` at every position of a probability grid.
pub fn renyi_map(probabilities: &[f64], q: f64) -> Result<Vec<f64>> {
    validate_renyi_order(q)?;
    check_probabilities(probabilities)?;
    Ok(probabilities.iter().map(|&p| binary_renyi(p, q)).collect())
}

fn check_probabilities(probabilities: &[f64]) -> Result<()> {
    if let Some(&p) = probabilities.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Per-block entropy scores with the configured measure.
fn entropy_map(probabilities: &[f64], cfg: &EntropyConfig) -> Vec<f64> {
    match cfg.measure {
        Measure::Shannon => probabilities.iter().map(|&p| binary_shannon(p)).collect(),
        Measure::Renyi => probabilities
            .iter()
            .map(|&p| binary_renyi(p, cfg.renyi_order))
            .collect(),
    }
}

/// The full per-image feature extraction described at the top of this
/// module. Blocks whose quantized DCT is all zeros contribute a 0 and are
/// counted in `degenerate_blocks`. Ties in the entropy score resolve to the
/// lowest zig-zag position (lower frequencies are the more stable choice).
pub fn extract_features(img: &GrayImage, cfg: &EntropyConfig) -> Result<FeatureVector> {
    cfg.validate()?;
    let g = cfg.block_size;
    let blocks = block_partition(img, g)?;
    let quant = scale_matrix_for(cfg)?;
    let order = dct::zigzag_order(g);

    let mut values = Vec::with_capacity(blocks.len());
    let mut degenerate = 0usize;
    for block in &blocks {
        let mut grid = dct::dct2(block);
        if let Some(qm) = &quant {
            grid = dct::quantize_block(&grid, qm)?;
        }
        let probabilities = match coefficient_probabilities(&grid) {
            Ok(p) => p,
            Err(Error::DegenerateBlock) => {
                degenerate += 1;
                values.push(0.0);
                continue;
            }
            Err(e) => return Err(e),
        };
        let entropies = entropy_map(&probabilities, cfg);
        let mut best_pos = 0usize;
        let mut best_entropy = f64::NEG_INFINITY;
        for (pos, &(u, v)) in order.iter().enumerate() {
            let e = entropies[u * g + v];
            if e > best_entropy {
                best_entropy = e;
                best_pos = pos;
            }
        }
        let (u, v) = order[best_pos];
        values.push(match cfg.feature_value {
            FeatureValue::Coefficient => grid.get(u, v),
            FeatureValue::EntropyScore => best_entropy,
        });
    }

    Ok(FeatureVector {
        values,
        blocks_x: img.width() / g,
        blocks_y: img.height() / g,
        source_measure: cfg.measure,
        degenerate_blocks: degenerate,
    })
}

/// The 8×8 JPEG table only applies to 8×8 blocks; other block sizes skip
/// quantization.
fn scale_matrix_for(cfg: &EntropyConfig) -> Result<Option<dct::QuantizationMatrix>> {
    if cfg.block_size == 8 {
        Ok(Some(dct::scale_quant_matrix(cfg.quality)?))
    } else {
        Ok(None)
    }
}
