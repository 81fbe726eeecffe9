//! Nearest-class-mean classification with L2, cosine, or Mahalanobis
//! distance.
//!
//! Training reduces each class to the arithmetic mean of its embeddings; a
//! query takes the label of the closest mean under the configured distance.
//! Mahalanobis uses the pooled *within-class* covariance (scatter around
//! each class's own mean), plus a trace-scaled ridge so it stays invertible
//! when the embedding dimension approaches the sample count.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    L2,
    Cosine,
    Mahalanobis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    /// Per-label mean embedding, ordered by label (which is also the
    /// tie-break order during classification).
    pub means: BTreeMap<String, Vec<f64>>,
    pub metric: Metric,
    pub ridge: f64,
    /// Regularized pooled covariance and its inverse; present iff the
    /// metric is Mahalanobis.
    pub covariance: Option<CovariancePair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariancePair {
    pub sigma: Vec<Vec<f64>>,
    pub sigma_inv: Vec<Vec<f64>>,
}

impl CovariancePair {
    fn from_matrices(sigma: &DMatrix<f64>, inv: &DMatrix<f64>) -> Self {
        let rows = |m: &DMatrix<f64>| {
            (0..m.nrows())
                .map(|i| m.row(i).iter().cloned().collect())
                .collect()
        };
        Self {
            sigma: rows(sigma),
            sigma_inv: rows(inv),
        }
    }

    pub fn inverse_matrix(&self) -> DMatrix<f64> {
        let d = self.sigma_inv.len();
        DMatrix::from_fn(d, d, |i, j| self.sigma_inv[i][j])
    }
}

/// Arithmetic mean embedding per label.
pub fn class_means(
    embeddings: &[Vec<f64>],
    labels: &[String],
) -> Result<BTreeMap<String, Vec<f64>>> {
    if embeddings.is_empty() {
        return Err(Error::invalid("no embeddings to average"));
    }
    if embeddings.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} embeddings but {} labels",
            embeddings.len(),
            labels.len()
        )));
    }
    let d = embeddings[0].len();
    let mut sums: BTreeMap<String, (Vec<f64>, usize)> = BTreeMap::new();
    for (x, label) in embeddings.iter().zip(labels) {
        if x.len() != d {
            return Err(Error::invalid("embeddings differ in dimension"));
        }
        let entry = sums.entry(label.clone()).or_insert_with(|| (vec![0.0; d], 0));
        for (s, v) in entry.0.iter_mut().zip(x) {
            *s += v;
        }
        entry.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(label, (sum, count))| {
            (
                label,
                sum.into_iter().map(|s| s / count as f64).collect(),
            )
        })
        .collect())
}

/// Distance between two vectors under `metric`. `sigma_inv` must be given
/// exactly when the metric is Mahalanobis.
pub fn distance(
    x: &[f64],
    y: &[f64],
    metric: Metric,
    sigma_inv: Option<&DMatrix<f64>>,
) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    match metric {
        Metric::L2 => Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()),
        Metric::Cosine => {
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            if nx == 0.0 || ny == 0.0 {
                return Err(Error::invalid("cosine distance undefined for a zero vector"));
            }
            Ok(-dot / (nx * ny))
        }
        Metric::Mahalanobis => {
            let inv = sigma_inv.ok_or_else(|| {
                Error::invalid("Mahalanobis distance requires a covariance inverse")
            })?;
            let diff = DVector::from_iterator(x.len(), x.iter().zip(y).map(|(a, b)| a - b));
            Ok((inv * &diff).dot(&diff))
        }
    }
}

/// Pooled within-class covariance with a trace-scaled ridge:
/// Σ = (1/N)·Σ_k Σ_{i∈k}(xᵢ−μ_k)(xᵢ−μ_k)ᵀ + ridge·(tr Σ/d)·I.
/// When the scatter is identically zero the ridge scale falls back to 1 so
/// the result stays invertible. Returns (Σ, Σ⁻¹).
pub fn fit_covariance(
    embeddings: &[Vec<f64>],
    labels: &[String],
    ridge: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if embeddings.len() < 2 {
        return Err(Error::invalid("covariance needs at least 2 embeddings"));
    }
    if ridge < 0.0 {
        return Err(Error::invalid("ridge must be non-negative"));
    }
    let means = class_means(embeddings, labels)?;
    let d = embeddings[0].len();
    let mut scatter = DMatrix::zeros(d, d);
    for (x, label) in embeddings.iter().zip(labels) {
        let mu = &means[label];
        let diff = DVector::from_iterator(d, x.iter().zip(mu).map(|(a, b)| a - b));
        scatter += &diff * diff.transpose();
    }
    let mut sigma = scatter / embeddings.len() as f64;
    if sigma.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("covariance has non-finite entries"));
    }
    let trace_scale = {
        let t = sigma.trace() / d as f64;
        if t > 0.0 {
            t
        } else {
            1.0
        }
    };
    for i in 0..d {
        sigma[(i, i)] += ridge * trace_scale;
    }
    let inv = Cholesky::new(sigma.clone())
        .ok_or_else(|| {
            Error::invalid("covariance is not positive definite; increase the ridge")
        })?
        .inverse();
    Ok((sigma, inv))
}

/// Fit the full classifier: class means, plus the covariance pair when the
/// metric is Mahalanobis.
pub fn fit(
    embeddings: &[Vec<f64>],
    labels: &[String],
    metric: Metric,
    ridge: f64,
) -> Result<ClassifierModel> {
    let means = class_means(embeddings, labels)?;
    let covariance = if metric == Metric::Mahalanobis {
        let (sigma, inv) = fit_covariance(embeddings, labels, ridge)?;
        Some(CovariancePair::from_matrices(&sigma, &inv))
    } else {
        None
    };
    Ok(ClassifierModel {
        means,
        metric,
        ridge,
        covariance,
    })
}

/// Label of the nearest class mean, with the realized distance. Ties go to
/// the lexicographically smallest label (the means map iterates in label
/// order and only a strictly smaller distance displaces the incumbent).
pub fn classify(x: &[f64], model: &ClassifierModel) -> Result<(String, f64)> {
    if model.means.is_empty() {
        return Err(Error::invalid("classifier has no classes"));
    }
    let inv = model.covariance.as_ref().map(|c| c.inverse_matrix());
    let mut best: Option<(&str, f64)> = None;
    for (label, mean) in &model.means {
        let d = distance(x, mean, model.metric, inv.as_ref())?;
        match best {
            Some((_, incumbent)) if d >= incumbent => {}
            _ => best = Some((label, d)),
        }
    }
    let (label, d) = best.expect("nonempty means");
    Ok((label.to_string(), d))
}
