//! RBF and arc-cosine kernels, feature standardization, and Gram matrices.
//!
//! The arc-cosine family comes from integrating threshold units against a
//! Gaussian weight distribution; the closed form is
//! `K_n(x, y) = (1/π)·‖x‖ⁿ‖y‖ⁿ·J_n(θ)` with θ the angle between the inputs
//! and J_n a degree-specific angular profile. Degree 0 depends on the angle
//! alone (range [0, 1]); higher degrees scale with the input norms, which is
//! why standardization defaults on for this family.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    Rbf,
    ArcCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub family: KernelFamily,
    /// Arc-cosine degree n ∈ {0, 1, 2}; ignored for RBF.
    pub degree: u32,
    /// RBF bandwidth σ > 0; ignored for arc-cosine.
    pub sigma: f64,
    /// Z-score features with training statistics before kernel evaluation.
    pub standardize: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            family: KernelFamily::ArcCosine,
            degree: 2,
            sigma: 1.0,
            standardize: true,
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        match self.family {
            KernelFamily::ArcCosine if self.degree > 2 => Err(Error::invalid(format!(
                "arc-cosine degree {} unsupported (0, 1, or 2)",
                self.degree
            ))),
            KernelFamily::Rbf if !self.sigma.is_finite() || self.sigma <= 0.0 => {
                Err(Error::invalid(format!("sigma must be positive, got {}", self.sigma)))
            }
            _ => Ok(()),
        }
    }

    /// Evaluate the configured kernel on a pair of vectors.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self.family {
            KernelFamily::Rbf => rbf_kernel(x, y, self.sigma),
            KernelFamily::ArcCosine => arc_cosine_kernel(x, y, self.degree),
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Angle between two nonzero vectors, in [0, π]. The cosine is clamped to
/// [−1, 1] to absorb rounding before `acos`. An elementwise-equal pair
/// returns exactly 0: near cos θ = 1 the rounding of the cosine alone moves
/// `acos` by ~1e-8, which would break the exact self-similarity identities
/// (K₀(x,x) = 1, K₂(x,x) = 3‖x‖⁴) that diagonal Gram entries rely on.
pub fn angle_between(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::invalid("angle undefined for a zero-norm vector"));
    }
    if x == y {
        return Ok(0.0);
    }
    Ok((dot(x, y) / (nx * ny)).clamp(-1.0, 1.0).acos())
}

/// Angular profile of the arc-cosine kernel of degree n ∈ {0, 1, 2}.
pub fn j_func(theta: f64, n: u32) -> Result<f64> {
    let (sin, cos) = theta.sin_cos();
    let pi_minus = std::f64::consts::PI - theta;
    match n {
        0 => Ok(pi_minus),
        1 => Ok(sin + pi_minus * cos),
        2 => Ok(3.0 * sin * cos + pi_minus * (1.0 + 2.0 * cos * cos)),
        _ => Err(Error::invalid(format!("j_func degree {n} unsupported (0, 1, or 2)"))),
    }
}

/// Arc-cosine kernel K_n(x, y) = (1/π)·‖x‖ⁿ‖y‖ⁿ·J_n(θ).
///
/// For n ≥ 1 a zero-norm argument gives 0 (the continuous limit); for n = 0
/// the angle itself is undefined at 0 and the call errors.
pub fn arc_cosine_kernel(x: &[f64], y: &[f64], n: u32) -> Result<f64> {
    if n > 2 {
        return Err(Error::invalid(format!(
            "arc-cosine degree {n} unsupported (0, 1, or 2)"
        )));
    }
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 {
        if n == 0 {
            return Err(Error::invalid(
                "degree-0 arc-cosine kernel undefined for a zero-norm vector",
            ));
        }
        return Ok(0.0);
    }
    let theta = angle_between(x, y)?;
    Ok((nx * ny).powi(n as i32) * j_func(theta, n)? / std::f64::consts::PI)
}

/// Gaussian kernel exp(−‖x−y‖² / 2σ²) ∈ (0, 1].
pub fn rbf_kernel(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let sq_dist: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-sq_dist / (2.0 * sigma * sigma)).exp())
}

/// Per-dimension z-scoring with training statistics. Dimensions with zero
/// spread keep their values unchanged (std treated as 1) so constants don't
/// blow up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(vectors: &[Vec<f64>]) -> Result<Self> {
        let d = check_same_dimension(vectors)?;
        let n = vectors.len() as f64;
        let mut mean = vec![0.0; d];
        for v in vectors {
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for v in vectors {
            for j in 0..d {
                let delta = v[j] - mean[j];
                var[j] += delta * delta;
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::invalid(format!(
                "dimension mismatch: standardizer is {}-dimensional, input is {}",
                self.mean.len(),
                x.len()
            )));
        }
        Ok(x.iter()
            .enumerate()
            .map(|(j, &v)| (v - self.mean[j]) / self.std[j])
            .collect())
    }

    pub fn apply_all(&self, vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        vectors.iter().map(|v| self.apply(v)).collect()
    }
}

/// Median pairwise Euclidean distance — the usual σ heuristic when no
/// bandwidth is given. Falls back to 1.0 when there are fewer than two
/// points or all points coincide.
pub fn median_pairwise_distance(vectors: &[Vec<f64>]) -> f64 {
    let n = vectors.len();
    if n < 2 {
        return 1.0;
    }
    let mut distances = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = vectors[i]
                .iter()
                .zip(&vectors[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            distances.push(d.sqrt());
        }
    }
    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = distances.len() / 2;
    let median = if distances.len() % 2 == 1 {
        distances[mid]
    } else {
        0.5 * (distances[mid - 1] + distances[mid])
    };
    if median > 0.0 {
        median
    } else {
        1.0
    }
}

fn check_same_dimension(vectors: &[Vec<f64>]) -> Result<usize> {
    let d = vectors
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::invalid("need at least one vector"))?;
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::invalid(format!(
            "dimension mismatch: expected {d}, found {}",
            v.len()
        )));
    }
    Ok(d)
}

/// Symmetric matrix of pairwise kernel values. Construction fills the upper
/// triangle (in parallel over rows) and mirrors it, so symmetry is exact by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Wrap an externally built symmetric matrix (tests, synthetic spectra).
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::invalid("Gram matrix must be square"));
        }
        let asym = (&entries - entries.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::invalid(format!(
                "matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        Ok(Self { entries })
    }
}

/// Pairwise kernel matrix of a dataset. Vectors are used as given — apply a
/// [`Standardizer`] first if the model calls for one; the `standardize` flag
/// in [`KernelConfig`] is consumed by the fitting layer, not here.
pub fn gram_matrix(vectors: &[Vec<f64>], cfg: &KernelConfig) -> Result<GramMatrix> {
    cfg.validate()?;
    check_same_dimension(vectors)?;
    let n = vectors.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            (i..n).map(|j| cfg.eval(&vectors[i], &vectors[j])).collect()
        })
        .collect::<Result<_>>()?;
    let mut entries = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (offset, &k) in row.iter().enumerate() {
            let j = i + offset;
            entries[(i, j)] = k;
            entries[(j, i)] = k;
        }
    }
    Ok(GramMatrix { entries })
}
