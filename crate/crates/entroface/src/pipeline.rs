//! End-to-end glue: image file → working resolution → illumination
//! normalization → entropy features → KECA embedding → nearest-class-mean
//! label. Everything here is deterministic; parallel feature extraction
//! preserves manifest order.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{self, ClassifierModel};
use crate::config::{PipelineConfig, SigmaSpec};
use crate::entropy::{extract_features, FeatureVector};
use crate::error::{Error, Result};
use crate::illum::normalize_illumination;
use crate::image::{downsample, load_pgm, GrayImage};
use crate::keca::{self, KecaModel};
use crate::kernel::{median_pairwise_distance, KernelFamily, Standardizer};
use crate::manifest::DatasetManifest;

/// Bring an image to the working resolution (when one is configured) and
/// normalize its illumination.
pub fn prepare_image(img: &GrayImage, cfg: &PipelineConfig) -> Result<GrayImage> {
    let sized = match (cfg.width, cfg.height) {
        (Some(w), Some(h)) => downsample(img, w, h)?,
        (None, None) => img.clone(),
        _ => {
            return Err(Error::invalid(
                "width and height must be set together or not at all",
            ))
        }
    };
    normalize_illumination(&sized, &cfg.illumination_params())
}

/// Feature vector of a single image under the full preprocessing chain.
pub fn image_features(img: &GrayImage, cfg: &PipelineConfig) -> Result<FeatureVector> {
    let prepared = prepare_image(img, cfg)?;
    extract_features(&prepared, &cfg.entropy_config())
}

/// Features for every manifest entry, in manifest order.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFeatures {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub paths: Vec<PathBuf>,
    /// Total all-zero quantized blocks encountered across the dataset.
    pub degenerate_blocks: usize,
}

impl DatasetFeatures {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// The subset at the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> DatasetFeatures {
        DatasetFeatures {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            paths: indices.iter().map(|&i| self.paths[i].clone()).collect(),
            degenerate_blocks: self.degenerate_blocks,
        }
    }
}

fn load_one(path: &Path, cfg: &PipelineConfig) -> Result<FeatureVector> {
    let item = path.display().to_string();
    let img = load_pgm(path).map_err(|e| e.in_stage("load", &item))?;
    let prepared = prepare_image(&img, cfg).map_err(|e| e.in_stage("normalize", &item))?;
    extract_features(&prepared, &cfg.entropy_config()).map_err(|e| e.in_stage("extract", &item))
}

/// Extract features for every image in a manifest, in parallel. The output
/// order matches the manifest; errors name the failing stage and file.
pub fn features_from_manifest(
    manifest: &DatasetManifest,
    cfg: &PipelineConfig,
) -> Result<DatasetFeatures> {
    cfg.validate()?;
    let resolved: Vec<PathBuf> = manifest.entries().iter().map(|e| manifest.resolve(e)).collect();
    let vectors: Vec<FeatureVector> = resolved
        .par_iter()
        .map(|path| load_one(path, cfg))
        .collect::<Result<_>>()?;

    let dims: Vec<usize> = vectors.iter().map(|v| v.values.len()).collect();
    if let Some(&first) = dims.first() {
        if let Some(i) = dims.iter().position(|&d| d != first) {
            return Err(Error::invalid(format!(
                "inconsistent feature lengths: {} has {} blocks but {} has {} \
                 (set width/height to force a common working resolution)",
                resolved[0].display(),
                first,
                resolved[i].display(),
                dims[i]
            )));
        }
    }

    let degenerate_blocks = vectors.iter().map(|v| v.degenerate_blocks).sum();
    Ok(DatasetFeatures {
        features: vectors.into_iter().map(|v| v.values).collect(),
        labels: manifest.entries().iter().map(|e| e.subject_id.clone()).collect(),
        paths: resolved,
        degenerate_blocks,
    })
}

/// Resolve the kernel bandwidth for a training set. Arc-cosine kernels have
/// no bandwidth, so any positive placeholder works; for RBF with
/// `sigma = median` the heuristic runs on the features as the Gram matrix
/// will see them, i.e. after standardization when that is enabled.
pub fn resolve_sigma(features: &[Vec<f64>], cfg: &PipelineConfig) -> Result<f64> {
    match (cfg.kernel, cfg.sigma) {
        (KernelFamily::ArcCosine, _) => Ok(1.0),
        (KernelFamily::Rbf, SigmaSpec::Fixed(s)) => Ok(s),
        (KernelFamily::Rbf, SigmaSpec::Median) => {
            let prepared = if cfg.standardize {
                Standardizer::fit(features)?.apply_all(features)?
            } else {
                features.to_vec()
            };
            Ok(median_pairwise_distance(&prepared))
        }
    }
}

/// A fully fitted recognizer: the configuration it was trained under, the
/// KECA embedding, and the nearest-class-mean classifier in embedding space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub config: PipelineConfig,
    pub keca: KecaModel,
    pub classifier: ClassifierModel,
}

impl TrainedModel {
    /// Classify one already-extracted feature vector.
    pub fn predict(&self, features: &[f64]) -> Result<(String, f64)> {
        let z = self.keca.project(features)?;
        classifier::classify(&z, &self.classifier)
    }

    /// Classify one image.
    pub fn predict_image(&self, img: &GrayImage) -> Result<(String, f64)> {
        let fv = image_features(img, &self.config)?;
        self.predict(&fv.values)
    }
}

/// Fit the embedding and classifier on a labeled feature set.
pub fn fit_model(
    features: &[Vec<f64>],
    labels: &[String],
    cfg: &PipelineConfig,
) -> Result<TrainedModel> {
    cfg.validate()?;
    if features.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let sigma = resolve_sigma(features, cfg)?;
    let keca = keca::fit(features, cfg.kernel_config(sigma), cfg.m)?;
    let classifier = classifier::fit(keca.embeddings(), labels, cfg.metric, cfg.ridge)?;
    Ok(TrainedModel {
        config: cfg.clone(),
        keca,
        classifier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Metric;
    use crate::manifest::{save_manifest, ManifestEntry};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn textured(seed: u64, w: usize, h: usize) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let base = 60.0
                    + 50.0 * ((x as f64) * 0.31).sin()
                    + 40.0 * ((y as f64) * 0.17).cos()
                    + 20.0 * ((x + 2 * y) as f64 * 0.09).sin();
                pixels.push((base + rng.gen_range(-8.0..8.0)).clamp(1.0, 254.0));
            }
        }
        GrayImage::new(w, h, pixels, 255.0).unwrap()
    }

    #[test]
    fn prepare_rejects_half_specified_resolution() {
        let cfg = PipelineConfig {
            width: Some(16),
            ..PipelineConfig::default()
        };
        assert!(prepare_image(&textured(1, 32, 32), &cfg).is_err());
    }

    #[test]
    fn prepare_downsamples_then_normalizes() {
        let cfg = PipelineConfig {
            width: Some(16),
            height: Some(16),
            ..PipelineConfig::default()
        };
        let out = prepare_image(&textured(2, 32, 32), &cfg).unwrap();
        assert_eq!((out.width(), out.height()), (16, 16));
    }

    #[test]
    fn image_features_dimension_matches_block_grid() {
        let cfg = PipelineConfig::default();
        let fv = image_features(&textured(3, 40, 24), &cfg).unwrap();
        assert_eq!((fv.blocks_x, fv.blocks_y), (5, 3));
        assert_eq!(fv.values.len(), 15);
    }

    #[test]
    fn manifest_features_preserve_order_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let mut entries = Vec::new();
        for subject in 1u32..=3 {
            for index in 1u32..=2 {
                let name = format!("s{subject}_{index}.pgm");
                let img = textured(u64::from(subject * 10 + index), 32, 32);
                crate::image::save_pgm(&img, &dir.path().join(&name)).unwrap();
                entries.push(ManifestEntry {
                    path: name.into(),
                    subject_id: format!("s{subject}"),
                    index,
                });
            }
        }
        let manifest_path = dir.path().join("manifest.csv");
        save_manifest(&entries, &manifest_path).unwrap();
        let manifest = DatasetManifest::load(&manifest_path).unwrap();

        let cfg = PipelineConfig::default();
        let ds = features_from_manifest(&manifest, &cfg).unwrap();
        assert_eq!(ds.len(), 6);
        assert_eq!(ds.labels, vec!["s1", "s1", "s2", "s2", "s3", "s3"]);
        assert_eq!(ds.features[0].len(), 16);

        // Sequential recomputation must agree exactly with the parallel run.
        for (i, entry) in manifest.entries().iter().enumerate() {
            let img = load_pgm(&manifest.resolve(entry)).unwrap();
            let fv = image_features(&img, &cfg).unwrap();
            assert_eq!(fv.values, ds.features[i]);
        }
    }

    #[test]
    fn mixed_resolutions_are_rejected_without_working_size() {
        let dir = tempfile::tempdir().unwrap();
        crate::image::save_pgm(&textured(1, 32, 32), &dir.path().join("a.pgm")).unwrap();
        crate::image::save_pgm(&textured(2, 24, 24), &dir.path().join("b.pgm")).unwrap();
        let entries = vec![
            ManifestEntry { path: "a.pgm".into(), subject_id: "s1".into(), index: 1 },
            ManifestEntry { path: "b.pgm".into(), subject_id: "s1".into(), index: 2 },
        ];
        let manifest_path = dir.path().join("manifest.csv");
        save_manifest(&entries, &manifest_path).unwrap();
        let manifest = DatasetManifest::load(&manifest_path).unwrap();

        let err = features_from_manifest(&manifest, &PipelineConfig::default()).unwrap_err();
        assert!(err.to_string().contains("inconsistent feature lengths"), "{err}");

        let cfg = PipelineConfig {
            width: Some(24),
            height: Some(24),
            ..PipelineConfig::default()
        };
        assert!(features_from_manifest(&manifest, &cfg).is_ok());
    }

    #[test]
    fn fit_and_predict_round_trip_on_training_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (label, center) in [("a", 0.0), ("b", 6.0)] {
            for _ in 0..8 {
                features.push(
                    (0..10)
                        .map(|_| center + rng.gen_range(-0.5..0.5))
                        .collect::<Vec<f64>>(),
                );
                labels.push(label.to_string());
            }
        }
        let cfg = PipelineConfig {
            m: 4,
            metric: Metric::L2,
            ..PipelineConfig::default()
        };
        let model = fit_model(&features, &labels, &cfg).unwrap();
        for (f, l) in features.iter().zip(&labels) {
            let (pred, _) = model.predict(f).unwrap();
            assert_eq!(&pred, l);
        }
    }

    #[test]
    fn resolve_sigma_median_uses_standardized_space() {
        // Two very different raw scales; after standardization both
        // coordinates contribute comparably, so sigma must differ from the
        // raw-space median.
        let features = vec![
            vec![0.0, 0.0],
            vec![1000.0, 0.1],
            vec![2000.0, 0.2],
            vec![3000.0, 0.3],
        ];
        let cfg = PipelineConfig {
            kernel: KernelFamily::Rbf,
            sigma: SigmaSpec::Median,
            ..PipelineConfig::default()
        };
        let standardized = resolve_sigma(&features, &cfg).unwrap();
        let raw = resolve_sigma(
            &features,
            &PipelineConfig {
                standardize: false,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert!(standardized < 3.0, "standardized median was {standardized}");
        assert!(raw > 500.0, "raw median was {raw}");
    }
}
