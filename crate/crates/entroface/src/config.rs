//! Flat key-value configuration for the whole pipeline.
//!
//! Every tunable parameter is a scalar, so the format is one `key = value`
//! per line with `#` comments. Absent keys take the documented defaults;
//! unknown keys and out-of-range values are rejected with the offending line
//! number. The parsed struct is also echoed verbatim into evaluation
//! reports, making every result self-describing.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entropy::{EntropyConfig, FeatureValue, Measure};
use crate::error::{Error, Result};
use crate::illum::{DcTarget, IlluminationParams, DEFAULT_DC_TARGET};
use crate::kernel::{KernelConfig, KernelFamily};
use crate::classifier::Metric;

/// RBF bandwidth: a concrete value, or the median pairwise distance of the
/// (standardized) training features, resolved at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SigmaSpec {
    Median,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Working resolution; `None` keeps each image's native size.
    pub width: Option<usize>,
    pub height: Option<usize>,
    // Illumination normalization.
    pub epsilon: f64,
    pub gray_levels: usize,
    pub suppress_count: usize,
    pub equalize: bool,
    pub dc_target: DcTarget,
    // Entropy feature extraction.
    pub block_size: usize,
    pub quality: u8,
    pub measure: Measure,
    pub renyi_order: f64,
    pub feature_value: FeatureValue,
    // Kernel.
    pub kernel: KernelFamily,
    pub degree: u32,
    pub sigma: SigmaSpec,
    pub standardize: bool,
    // Embedding and classification.
    pub m: usize,
    pub metric: Metric,
    pub ridge: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            width: None,
            height: None,
            epsilon: 1e-4,
            gray_levels: 256,
            suppress_count: 3,
            equalize: true,
            dc_target: DcTarget::Fixed(DEFAULT_DC_TARGET),
            block_size: 8,
            quality: 50,
            measure: Measure::Renyi,
            renyi_order: 2.0,
            feature_value: FeatureValue::Coefficient,
            kernel: KernelFamily::ArcCosine,
            degree: 2,
            sigma: SigmaSpec::Median,
            standardize: true,
            m: 20,
            metric: Metric::Mahalanobis,
            ridge: 1e-6,
        }
    }
}

impl PipelineConfig {
    pub fn illumination_params(&self) -> IlluminationParams {
        IlluminationParams {
            epsilon: self.epsilon,
            gray_levels: self.gray_levels,
            suppress_count: self.suppress_count,
            equalize: self.equalize,
            dc_target: self.dc_target,
        }
    }

    pub fn entropy_config(&self) -> EntropyConfig {
        EntropyConfig {
            block_size: self.block_size,
            quality: self.quality,
            measure: self.measure,
            renyi_order: self.renyi_order,
            feature_value: self.feature_value,
        }
    }

    /// Kernel configuration with the bandwidth already resolved.
    pub fn kernel_config(&self, resolved_sigma: f64) -> KernelConfig {
        KernelConfig {
            family: self.kernel,
            degree: self.degree,
            sigma: resolved_sigma,
            standardize: self.standardize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.illumination_params().validate()?;
        self.entropy_config().validate()?;
        self.kernel_config(1.0).validate()?;
        if let SigmaSpec::Fixed(s) = self.sigma {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::invalid(format!("sigma must be positive, got {s}")));
            }
        }
        if self.m == 0 {
            return Err(Error::invalid("m must be ≥ 1"));
        }
        if self.ridge < 0.0 {
            return Err(Error::invalid("ridge must be non-negative"));
        }
        if let Some(w) = self.width {
            if w == 0 {
                return Err(Error::invalid("width must be positive"));
            }
        }
        if let Some(h) = self.height {
            if h == 0 {
                return Err(Error::invalid("height must be positive"));
            }
        }
        Ok(())
    }
}

/// Parse a key-value configuration file; see the key table in the README.
pub fn parse_config(path: &Path) -> Result<PipelineConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config_str(&text).map_err(|(line, reason)| Error::Config {
        path: path.to_owned(),
        line,
        reason,
    })
}

/// The parser behind [`parse_config`]; errors carry `(line_number, reason)`.
pub fn parse_config_str(text: &str) -> std::result::Result<PipelineConfig, (usize, String)> {
    let mut cfg = PipelineConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| (line_no, format!("expected `key = value`, found `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value).map_err(|reason| (line_no, reason))?;
    }
    if let Err(e) = cfg.validate() {
        return Err((0, e.to_string()));
    }
    Ok(cfg)
}

fn apply_key(cfg: &mut PipelineConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
    where
        T::Err: fmt::Display,
    {
        value
            .parse()
            .map_err(|e| format!("invalid value `{value}` for {key}: {e}"))
    }
    fn parse_bool(key: &str, value: &str) -> std::result::Result<bool, String> {
        match value {
            "true" | "on" | "yes" | "1" => Ok(true),
            "false" | "off" | "no" | "0" => Ok(false),
            _ => Err(format!("invalid value `{value}` for {key}: expected true/false")),
        }
    }

    match key {
        "width" => cfg.width = Some(parse(key, value)?),
        "height" => cfg.height = Some(parse(key, value)?),
        "epsilon" => {
            let v: f64 = parse(key, value)?;
            if !v.is_finite() || v <= 0.0 {
                return Err(format!("epsilon must be positive, got {v}"));
            }
            cfg.epsilon = v;
        }
        "gray_levels" => {
            let v: usize = parse(key, value)?;
            if v == 0 {
                return Err("gray_levels must be ≥ 1".into());
            }
            cfg.gray_levels = v;
        }
        "suppress_count" => cfg.suppress_count = parse(key, value)?,
        "equalize" => cfg.equalize = parse_bool(key, value)?,
        "dc_target" => {
            cfg.dc_target = if value == "logmean" {
                DcTarget::InputLogMean
            } else {
                DcTarget::Fixed(parse(key, value)?)
            };
        }
        "block_size" => {
            let v: usize = parse(key, value)?;
            if v == 0 {
                return Err("block_size must be ≥ 1".into());
            }
            cfg.block_size = v;
        }
        "quality" => {
            let v: u8 = parse(key, value)?;
            if !(1..=100).contains(&v) {
                return Err(format!("quality must be in 1..=100, got {v}"));
            }
            cfg.quality = v;
        }
        "measure" => {
            cfg.measure = match value {
                "shannon" => Measure::Shannon,
                "renyi" => Measure::Renyi,
                _ => return Err(format!("invalid measure `{value}` (shannon or renyi)")),
            };
        }
        "renyi_order" => {
            let v: f64 = parse(key, value)?;
            if !v.is_finite() || v <= 0.0 || v == 1.0 {
                return Err(format!("renyi_order must be positive and ≠ 1, got {v}"));
            }
            cfg.renyi_order = v;
        }
        "feature_value" => {
            cfg.feature_value = match value {
                "coefficient" => FeatureValue::Coefficient,
                "entropy" => FeatureValue::EntropyScore,
                _ => return Err(format!("invalid feature_value `{value}` (coefficient or entropy)")),
            };
        }
        "kernel" => {
            cfg.kernel = match value {
                "arccos" => KernelFamily::ArcCosine,
                "rbf" => KernelFamily::Rbf,
                _ => return Err(format!("invalid kernel `{value}` (arccos or rbf)")),
            };
        }
        "degree" => {
            let v: u32 = parse(key, value)?;
            if v > 2 {
                return Err(format!("degree must be 0, 1, or 2, got {v}"));
            }
            cfg.degree = v;
        }
        "sigma" => {
            cfg.sigma = if value == "median" {
                SigmaSpec::Median
            } else {
                let v: f64 = parse(key, value)?;
                if !v.is_finite() || v <= 0.0 {
                    return Err(format!("sigma must be positive, got {v}"));
                }
                SigmaSpec::Fixed(v)
            };
        }
        "standardize" => cfg.standardize = parse_bool(key, value)?,
        "m" => {
            let v: usize = parse(key, value)?;
            if v == 0 {
                return Err("m must be ≥ 1".into());
            }
            cfg.m = v;
        }
        "metric" => {
            cfg.metric = match value {
                "l2" => Metric::L2,
                "cosine" => Metric::Cosine,
                "mahalanobis" => Metric::Mahalanobis,
                _ => return Err(format!("invalid metric `{value}` (l2, cosine, or mahalanobis)")),
            };
        }
        "ridge" => {
            let v: f64 = parse(key, value)?;
            if v < 0.0 {
                return Err(format!("ridge must be non-negative, got {v}"));
            }
            cfg.ridge = v;
        }
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}
