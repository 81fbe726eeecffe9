//! Evaluation protocols and reporting.
//!
//! Two split families are provided: EP1 — the first `n` images of every
//! subject train and the remainder test — and leave-one-out, one fold per
//! image. Reports carry overall accuracy, one-vs-rest sensitivity and
//! specificity per class with macro averages, the full confusion matrix,
//! the configuration that produced them, and any warnings raised along the
//! way. Nothing in the pipeline is randomized, so a report is a pure
//! function of (manifest, config): runs are byte-identical at any thread
//! count, because parallel sections collect in input order and aggregation
//! happens sequentially afterwards.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{self, Metric};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::image::{downsample, load_pgm};
use crate::manifest::DatasetManifest;
use crate::pipeline::{features_from_manifest, fit_model, DatasetFeatures};

/// Which protocol a split came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    Ep1 { n_train: usize },
    Loo,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Ep1 { n_train } => write!(f, "ep1({n_train})"),
            Protocol::Loo => write!(f, "loo"),
        }
    }
}

/// A train/test partition, as indices into the manifest's entry list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub protocol: Protocol,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// First `n_train` images of every subject train, the rest test. Image
/// order within a subject follows the manifest's `index` column, so the
/// split is reproducible across shuffled manifest files.
pub fn split_ep1(manifest: &DatasetManifest, n_train: usize) -> Result<SplitPlan> {
    if n_train == 0 {
        return Err(Error::invalid("n_train must be ≥ 1"));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (subject, positions) in manifest.positions_by_subject() {
        if positions.len() <= n_train {
            return Err(Error::invalid(format!(
                "subject {subject} has {} images; EP1({n_train}) needs more than {n_train}",
                positions.len()
            )));
        }
        train.extend_from_slice(&positions[..n_train]);
        test.extend_from_slice(&positions[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPlan {
        protocol: Protocol::Ep1 { n_train },
        train,
        test,
    })
}

/// One fold per image: that image tests, every other image trains.
pub fn split_loo(manifest: &DatasetManifest) -> Result<Vec<SplitPlan>> {
    for (subject, positions) in manifest.positions_by_subject() {
        if positions.len() < 2 {
            return Err(Error::invalid(format!(
                "subject {subject} has a single image; leave-one-out needs ≥ 2"
            )));
        }
    }
    let n = manifest.len();
    Ok((0..n)
        .map(|held_out| SplitPlan {
            protocol: Protocol::Loo,
            train: (0..n).filter(|&i| i != held_out).collect(),
            test: vec![held_out],
        })
        .collect())
}

/// One-vs-rest error rates for a single class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub sensitivity: f64,
    pub specificity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub protocol: String,
    /// `pipeline` or `raw_pixel_baseline`.
    pub method: String,
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub macro_sensitivity: f64,
    pub macro_specificity: f64,
    pub per_class: BTreeMap<String, ClassStats>,
    /// `confusion[true_label][predicted_label]`, every class keyed in both
    /// dimensions so row sums equal per-class test counts.
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
    pub config: PipelineConfig,
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    /// Deterministic pretty JSON (maps are ordered, floats are shortest
    /// round-trip decimals), with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }

    /// Flat numeric summary for tabulation: `section,label,metric,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,label,metric,value\n");
        let mut push = |section: &str, label: &str, metric: &str, value: String| {
            out.push_str(&format!("{section},{label},{metric},{value}\n"));
        };
        push("summary", "", "accuracy", format!("{}", self.accuracy));
        push("summary", "", "correct", format!("{}", self.correct));
        push("summary", "", "total", format!("{}", self.total));
        push(
            "summary",
            "",
            "macro_sensitivity",
            format!("{}", self.macro_sensitivity),
        );
        push(
            "summary",
            "",
            "macro_specificity",
            format!("{}", self.macro_specificity),
        );
        for (label, stats) in &self.per_class {
            push("per_class", label, "sensitivity", format!("{}", stats.sensitivity));
            push("per_class", label, "specificity", format!("{}", stats.specificity));
        }
        for (truth, row) in &self.confusion {
            for (predicted, count) in row {
                if *count > 0 {
                    push("confusion", truth, predicted, format!("{count}"));
                }
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }
}

/// Assemble a report from (true, predicted) pairs. `classes` is the label
/// universe of the confusion matrix; true and predicted labels must all be
/// members.
fn build_report(
    protocol: String,
    method: String,
    outcomes: &[(String, String)],
    classes: &[String],
    config: &PipelineConfig,
    mut warnings: Vec<String>,
) -> Result<EvaluationReport> {
    if outcomes.is_empty() {
        return Err(Error::invalid("no test outcomes to report"));
    }
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = classes
        .iter()
        .map(|t| {
            (
                t.clone(),
                classes.iter().map(|p| (p.clone(), 0usize)).collect(),
            )
        })
        .collect();
    for (truth, predicted) in outcomes {
        let row = confusion
            .get_mut(truth)
            .ok_or_else(|| Error::invalid(format!("label {truth} missing from class list")))?;
        let cell = row
            .get_mut(predicted)
            .ok_or_else(|| Error::invalid(format!("label {predicted} missing from class list")))?;
        *cell += 1;
    }

    let total = outcomes.len();
    let correct = confusion
        .iter()
        .map(|(t, row)| row.get(t).copied().unwrap_or(0))
        .sum::<usize>();
    let accuracy = correct as f64 / total as f64;

    let mut per_class = BTreeMap::new();
    let (mut sens_sum, mut sens_n) = (0.0, 0usize);
    let (mut spec_sum, mut spec_n) = (0.0, 0usize);
    for class in classes {
        let row_sum: usize = confusion[class].values().sum();
        let tp = confusion[class][class];
        let fn_ = row_sum - tp;
        let fp: usize = confusion
            .iter()
            .filter(|(t, _)| *t != class)
            .map(|(_, row)| row[class])
            .sum();
        let tn = total - tp - fn_ - fp;
        if row_sum == 0 {
            warnings.push(format!(
                "class {class} has no test instances; omitted from per-class rates"
            ));
            continue;
        }
        let sensitivity = tp as f64 / (tp + fn_) as f64;
        sens_sum += sensitivity;
        sens_n += 1;
        let specificity = if tn + fp > 0 {
            let s = tn as f64 / (tn + fp) as f64;
            spec_sum += s;
            spec_n += 1;
            s
        } else {
            // Single-class test set: no negatives exist. Report 1.0 but
            // leave it out of the macro average.
            warnings.push(format!(
                "class {class} has no negative test instances; specificity is vacuous"
            ));
            1.0
        };
        per_class.insert(
            class.clone(),
            ClassStats {
                sensitivity,
                specificity,
            },
        );
    }

    Ok(EvaluationReport {
        protocol,
        method,
        accuracy,
        correct,
        total,
        macro_sensitivity: if sens_n > 0 { sens_sum / sens_n as f64 } else { 0.0 },
        macro_specificity: if spec_n > 0 { spec_sum / spec_n as f64 } else { 0.0 },
        per_class,
        confusion,
        config: config.clone(),
        warnings,
    })
}

fn check_split(split: &SplitPlan, n: usize) -> Result<()> {
    if split.train.is_empty() || split.test.is_empty() {
        return Err(Error::invalid("split needs nonempty train and test sets"));
    }
    if let Some(&i) = split.train.iter().chain(&split.test).find(|&&i| i >= n) {
        return Err(Error::invalid(format!(
            "split index {i} out of range for {n} manifest entries"
        )));
    }
    Ok(())
}

fn class_universe(labels: &[String]) -> Vec<String> {
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    classes
}

/// (true, predicted) label pairs in test order, plus fit warnings.
type SplitOutcomes = (Vec<(String, String)>, Vec<String>);

/// Fit on the split's train rows and classify its test rows.
fn fit_and_classify(
    data: &DatasetFeatures,
    split: &SplitPlan,
    cfg: &PipelineConfig,
) -> Result<SplitOutcomes> {
    let train = data.subset(&split.train);
    let model = fit_model(&train.features, &train.labels, cfg)?;
    let mut warnings = Vec::new();
    if model.keca.reduced() {
        warnings.push(format!(
            "requested m = {} but only {} usable eigenvalue-vector pairs existed",
            cfg.m,
            model.keca.embedding_dim()
        ));
    }
    let outcomes = split
        .test
        .par_iter()
        .map(|&i| {
            let (predicted, _) = model.predict(&data.features[i])?;
            Ok((data.labels[i].clone(), predicted))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((outcomes, warnings))
}

fn degenerate_warning(data: &DatasetFeatures) -> Option<String> {
    (data.degenerate_blocks > 0).then(|| {
        format!(
            "{} block(s) quantized to all zeros and contributed 0-valued features",
            data.degenerate_blocks
        )
    })
}

/// Evaluate one split on features that were already extracted.
pub fn evaluate_prepared(
    data: &DatasetFeatures,
    split: &SplitPlan,
    cfg: &PipelineConfig,
) -> Result<EvaluationReport> {
    check_split(split, data.len())?;
    let mut warnings: Vec<String> = degenerate_warning(data).into_iter().collect();
    let (outcomes, fit_warnings) = fit_and_classify(data, split, cfg)?;
    warnings.extend(fit_warnings);
    let classes = class_universe(&data.labels);
    build_report(
        split.protocol.to_string(),
        "pipeline".into(),
        &outcomes,
        &classes,
        cfg,
        warnings,
    )
}

/// The full pipeline on one split: extract features for every manifest
/// entry, fit on the train rows, classify the test rows.
pub fn run_pipeline(
    manifest: &DatasetManifest,
    split: &SplitPlan,
    cfg: &PipelineConfig,
) -> Result<EvaluationReport> {
    let data = features_from_manifest(manifest, cfg)?;
    evaluate_prepared(&data, split, cfg)
}

/// Leave-one-out over the whole manifest. Features are extracted once —
/// they depend only on the image and the config, not the split — and every
/// fold refits the embedding and classifier on its own train rows. Folds
/// run in parallel; results are collected in fold order.
pub fn run_loo(manifest: &DatasetManifest, cfg: &PipelineConfig) -> Result<EvaluationReport> {
    let folds = split_loo(manifest)?;
    let data = features_from_manifest(manifest, cfg)?;
    let per_fold: Vec<SplitOutcomes> = folds
        .par_iter()
        .map(|fold| fit_and_classify(&data, fold, cfg))
        .collect::<Result<_>>()?;

    let mut outcomes = Vec::with_capacity(folds.len());
    let mut reduced_folds = 0usize;
    for (fold_outcomes, fold_warnings) in per_fold {
        outcomes.extend(fold_outcomes);
        if !fold_warnings.is_empty() {
            reduced_folds += 1;
        }
    }
    let mut warnings: Vec<String> = degenerate_warning(&data).into_iter().collect();
    if reduced_folds > 0 {
        warnings.push(format!(
            "KECA axis count fell below m = {} in {reduced_folds} of {} folds",
            cfg.m,
            folds.len()
        ));
    }
    let classes = class_universe(&data.labels);
    build_report(
        Protocol::Loo.to_string(),
        "pipeline".into(),
        &outcomes,
        &classes,
        cfg,
        warnings,
    )
}

/// Raw pixel vectors at the working resolution, in manifest order.
pub fn raw_pixel_vectors(
    manifest: &DatasetManifest,
    cfg: &PipelineConfig,
) -> Result<DatasetFeatures> {
    let resolved: Vec<std::path::PathBuf> =
        manifest.entries().iter().map(|e| manifest.resolve(e)).collect();
    let features: Vec<Vec<f64>> = resolved
        .par_iter()
        .map(|path| {
            let item = path.display().to_string();
            let img = load_pgm(path).map_err(|e| e.in_stage("load", &item))?;
            let sized = match (cfg.width, cfg.height) {
                (Some(w), Some(h)) => {
                    downsample(&img, w, h).map_err(|e| e.in_stage("downsample", &item))?
                }
                _ => img,
            };
            Ok(sized.pixels().to_vec())
        })
        .collect::<Result<_>>()?;
    if let Some(first) = features.first().map(Vec::len) {
        if let Some(i) = features.iter().position(|f| f.len() != first) {
            return Err(Error::invalid(format!(
                "inconsistent image sizes for the raw-pixel baseline: {} vs {} \
                 (set width/height to force a common working resolution)",
                resolved[0].display(),
                resolved[i].display()
            )));
        }
    }
    Ok(DatasetFeatures {
        features,
        labels: manifest.entries().iter().map(|e| e.subject_id.clone()).collect(),
        paths: resolved,
        degenerate_blocks: 0,
    })
}

/// Nearest-class-mean on raw downsampled pixels with the L2 metric — the
/// comparison floor every embedding run is expected to beat.
pub fn baseline_raw_pixels(
    manifest: &DatasetManifest,
    split: &SplitPlan,
    cfg: &PipelineConfig,
) -> Result<EvaluationReport> {
    let data = raw_pixel_vectors(manifest, cfg)?;
    check_split(split, data.len())?;
    let train = data.subset(&split.train);
    let model = classifier::fit(&train.features, &train.labels, Metric::L2, 0.0)?;
    let outcomes = split
        .test
        .par_iter()
        .map(|&i| {
            let (predicted, _) = classifier::classify(&data.features[i], &model)?;
            Ok((data.labels[i].clone(), predicted))
        })
        .collect::<Result<Vec<_>>>()?;
    let classes = class_universe(&data.labels);
    build_report(
        split.protocol.to_string(),
        "raw_pixel_baseline".into(),
        &outcomes,
        &classes,
        cfg,
        Vec::new(),
    )
}

/// Leave-one-out for the raw-pixel baseline: one nearest-mean fit per fold.
/// No eigendecomposition is involved, so this is cheap even at 400 folds.
pub fn baseline_loo(manifest: &DatasetManifest, cfg: &PipelineConfig) -> Result<EvaluationReport> {
    let folds = split_loo(manifest)?;
    let data = raw_pixel_vectors(manifest, cfg)?;
    let per_fold: Vec<Vec<(String, String)>> = folds
        .par_iter()
        .map(|fold| {
            let train = data.subset(&fold.train);
            let model = classifier::fit(&train.features, &train.labels, Metric::L2, 0.0)?;
            fold.test
                .iter()
                .map(|&i| {
                    let (predicted, _) = classifier::classify(&data.features[i], &model)?;
                    Ok((data.labels[i].clone(), predicted))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let outcomes: Vec<(String, String)> = per_fold.into_iter().flatten().collect();
    let classes = class_universe(&data.labels);
    build_report(
        Protocol::Loo.to_string(),
        "raw_pixel_baseline".into(),
        &outcomes,
        &classes,
        cfg,
        Vec::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{save_pgm, GrayImage};
    use crate::manifest::{save_manifest, ManifestEntry};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::path::PathBuf;

    fn fake_manifest(subjects: usize, images: usize) -> DatasetManifest {
        let entries: Vec<ManifestEntry> = (1..=subjects)
            .flat_map(|s| {
                (1..=images).map(move |i| ManifestEntry {
                    path: PathBuf::from(format!("s{s:02}_{i}.pgm")),
                    subject_id: format!("s{s:02}"),
                    index: i as u32,
                })
            })
            .collect();
        DatasetManifest::from_entries(entries, PathBuf::from(".")).unwrap()
    }

    #[test]
    fn ep1_split_arithmetic() {
        let orl_like = fake_manifest(40, 10);
        let five = split_ep1(&orl_like, 5).unwrap();
        assert_eq!(five.train.len(), 200);
        assert_eq!(five.test.len(), 200);
        let two = split_ep1(&orl_like, 2).unwrap();
        assert_eq!(two.train.len(), 80);
        assert_eq!(two.test.len(), 320);
        assert!(split_ep1(&orl_like, 10).is_err());
        assert!(split_ep1(&orl_like, 0).is_err());
    }

    #[test]
    fn ep1_split_partitions() {
        let manifest = fake_manifest(3, 4);
        let split = split_ep1(&manifest, 2).unwrap();
        let mut all: Vec<usize> = split.train.iter().chain(&split.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
        // First-two-per-subject rule, in manifest positions.
        assert_eq!(split.train, vec![0, 1, 4, 5, 8, 9]);
    }

    #[test]
    fn loo_fold_structure() {
        let orl_like = fake_manifest(40, 10);
        let folds = split_loo(&orl_like).unwrap();
        assert_eq!(folds.len(), 400);

        let tiny = fake_manifest(2, 2);
        let folds = split_loo(&tiny).unwrap();
        assert_eq!(folds.len(), 4);
        let mut tested: Vec<usize> = folds.iter().flat_map(|f| f.test.clone()).collect();
        tested.sort_unstable();
        assert_eq!(tested, vec![0, 1, 2, 3]);
        for fold in &folds {
            assert_eq!(fold.train.len(), 3);
            assert!(!fold.train.contains(&fold.test[0]));
        }

        assert!(split_loo(&fake_manifest(2, 1)).is_err());
    }

    /// A deterministic per-subject texture with mild per-image variation.
    fn subject_image(subject: u64, variant: u64, w: usize, h: usize) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(subject * 1000 + variant);
        let fx = 0.13 + 0.07 * subject as f64;
        let fy = 0.29 - 0.04 * subject as f64;
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let base = 110.0
                    + 60.0 * ((x as f64) * fx + subject as f64).sin()
                    + 50.0 * ((y as f64) * fy).cos()
                    + 15.0 * (((x * y) as f64) * 0.01 + variant as f64).sin();
                pixels.push((base + rng.gen_range(-6.0..6.0)).clamp(1.0, 254.0));
            }
        }
        GrayImage::new(w, h, pixels, 255.0).unwrap()
    }

    fn write_dataset(
        dir: &Path,
        subjects: u64,
        images: u64,
        image_for: impl Fn(u64, u64) -> GrayImage,
    ) -> DatasetManifest {
        let mut entries = Vec::new();
        for s in 1..=subjects {
            for i in 1..=images {
                let name = format!("s{s:02}_{i}.pgm");
                save_pgm(&image_for(s, i), &dir.join(&name)).unwrap();
                entries.push(ManifestEntry {
                    path: name.into(),
                    subject_id: format!("s{s:02}"),
                    index: i as u32,
                });
            }
        }
        let path = dir.join("manifest.csv");
        save_manifest(&entries, &path).unwrap();
        DatasetManifest::load(&path).unwrap()
    }

    fn small_cfg() -> PipelineConfig {
        PipelineConfig {
            m: 6,
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn confusion_matrix_is_consistent() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_dataset(dir.path(), 4, 5, |s, i| subject_image(s, i, 32, 32));
        let cfg = small_cfg();
        let split = split_ep1(&manifest, 3).unwrap();
        let report = run_pipeline(&manifest, &split, &cfg).unwrap();

        // Row sums equal per-class test counts (2 each), the accuracy
        // identity holds, and the total matches the test set size.
        assert_eq!(report.total, 8);
        let mut grand = 0usize;
        let mut diagonal = 0usize;
        for (truth, row) in &report.confusion {
            let row_sum: usize = row.values().sum();
            assert_eq!(row_sum, 2, "row {truth}");
            grand += row_sum;
            diagonal += row[truth];
        }
        assert_eq!(grand, report.total);
        assert_eq!(diagonal, report.correct);
        assert!((report.accuracy - diagonal as f64 / grand as f64).abs() < 1e-15);

        // Recompute one class's sensitivity and specificity by hand.
        let class = report.per_class.keys().next().unwrap().clone();
        let tp = report.confusion[&class][&class];
        let fn_: usize = report.confusion[&class].values().sum::<usize>() - tp;
        let fp: usize = report
            .confusion
            .iter()
            .filter(|(t, _)| **t != class)
            .map(|(_, row)| row[&class])
            .sum();
        let tn = report.total - tp - fn_ - fp;
        let stats = report.per_class[&class];
        assert!((stats.sensitivity - tp as f64 / (tp + fn_) as f64).abs() < 1e-15);
        assert!((stats.specificity - tn as f64 / (tn + fp) as f64).abs() < 1e-15);
    }

    #[test]
    fn separable_duplicates_classify_perfectly() {
        // Each subject is the same image repeated; subjects differ.
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_dataset(dir.path(), 2, 4, |s, _| subject_image(s, 1, 32, 32));
        let cfg = small_cfg();
        let split = split_ep1(&manifest, 2).unwrap();
        let report = run_pipeline(&manifest, &split, &cfg).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.macro_sensitivity, 1.0);
        assert_eq!(report.macro_specificity, 1.0);

        let baseline = baseline_raw_pixels(&manifest, &split, &cfg).unwrap();
        assert_eq!(baseline.accuracy, 1.0);
        assert_eq!(baseline.method, "raw_pixel_baseline");
    }

    #[test]
    fn self_split_at_least_as_good_as_disjoint() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_dataset(dir.path(), 3, 6, |s, i| subject_image(s, i, 32, 32));
        let cfg = small_cfg();

        let disjoint = split_ep1(&manifest, 3).unwrap();
        let disjoint_report = run_pipeline(&manifest, &disjoint, &cfg).unwrap();

        let everything: Vec<usize> = (0..manifest.len()).collect();
        let self_split = SplitPlan {
            protocol: Protocol::Ep1 { n_train: 6 },
            train: everything.clone(),
            test: everything,
        };
        let self_report = run_pipeline(&manifest, &self_split, &cfg).unwrap();
        assert!(
            self_report.accuracy >= disjoint_report.accuracy,
            "self {} < disjoint {}",
            self_report.accuracy,
            disjoint_report.accuracy
        );
    }

    #[test]
    fn loo_tests_every_image_once() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_dataset(dir.path(), 2, 3, |s, i| subject_image(s, i, 32, 32));
        let cfg = small_cfg();
        let report = run_loo(&manifest, &cfg).unwrap();
        assert_eq!(report.total, 6);
        assert_eq!(report.protocol, "loo");
        let grand: usize = report
            .confusion
            .values()
            .map(|row| row.values().sum::<usize>())
            .sum();
        assert_eq!(grand, 6);
        // Row sums equal each subject's image count.
        for row in report.confusion.values() {
            assert_eq!(row.values().sum::<usize>(), 3);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_dataset(dir.path(), 3, 4, |s, i| subject_image(s, i, 32, 32));
        let cfg = small_cfg();
        let split = split_ep1(&manifest, 2).unwrap();
        let a = run_pipeline(&manifest, &split, &cfg).unwrap().to_json();
        let b = run_pipeline(&manifest, &split, &cfg).unwrap().to_json();
        assert_eq!(a, b);
        let l1 = run_loo(&manifest, &cfg).unwrap().to_json();
        let l2 = run_loo(&manifest, &cfg).unwrap().to_json();
        assert_eq!(l1, l2);
    }

    #[test]
    fn csv_summary_lists_expected_sections() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_dataset(dir.path(), 2, 3, |s, i| subject_image(s, i, 32, 32));
        let cfg = small_cfg();
        let split = split_ep1(&manifest, 2).unwrap();
        let report = run_pipeline(&manifest, &split, &cfg).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "section,label,metric,value");
        assert!(lines.iter().any(|l| l.starts_with("summary,,accuracy,")));
        assert!(lines.iter().any(|l| l.starts_with("per_class,s01,sensitivity,")));
        assert!(lines.iter().any(|l| l.starts_with("confusion,")));
        // Confusion rows with nonzero counts sum to the test total.
        let confusion_total: usize = lines
            .iter()
            .filter(|l| l.starts_with("confusion,"))
            .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
            .sum();
        assert_eq!(confusion_total, report.total);
    }

    #[test]
    fn split_bounds_are_checked() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_dataset(dir.path(), 2, 3, |s, i| subject_image(s, i, 32, 32));
        let bogus = SplitPlan {
            protocol: Protocol::Ep1 { n_train: 1 },
            train: vec![0, 99],
            test: vec![1],
        };
        assert!(run_pipeline(&manifest, &bogus, &small_cfg()).is_err());
    }
}
