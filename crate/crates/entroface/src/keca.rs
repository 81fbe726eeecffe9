//! Kernel entropy component analysis.
//!
//! A Parzen-window Rényi entropy estimate of a dataset factors through the
//! spectrum of its *uncentered* kernel matrix K = E·D·Eᵀ: the quantity
//! V̂ = (1/N²)·ΣᵢⱼK(i,j) equals Σᵢ cᵢ with per-axis contributions
//! cᵢ = (1/N²)·(√λᵢ·eᵢᵀ1)². KECA keeps the axes with the largest cᵢ — which
//! is generally *not* the largest-eigenvalue order, because an axis whose
//! eigenvector is orthogonal to the all-ones vector carries no entropy no
//! matter how large its eigenvalue. Centering the Gram matrix would zero
//! every eᵢᵀ1 term, so unlike kernel PCA the matrix is used as-is.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{gram_matrix, GramMatrix, KernelConfig, Standardizer};

/// Relative eigenvalue floor: axes with λ ≤ TOL_LAMBDA·λmax are unusable.
pub const TOL_LAMBDA: f64 = 1e-12;
/// Absolute floor on |eᵀ1|: axes orthogonal to the ones vector carry no
/// entropy and are dropped.
pub const TOL_ONE: f64 = 1e-10;

/// Full spectrum of a symmetric matrix, eigenvalues descending, matching
/// unit-norm eigenvectors as columns. Signs are normalized so eᵢᵀ1 ≥ 0
/// (falling back to a positive leading component when eᵢᵀ1 = 0), which keeps
/// embeddings identical across eigensolver implementations.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, i: usize) -> DVector<f64> {
        self.eigenvectors.column(i).into_owned()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Eigendecompose a symmetric Gram matrix.
pub fn eigendecompose(gram: &GramMatrix) -> Result<EigenSystem> {
    let k = gram.as_matrix();
    let eigen = k.clone().symmetric_eigen();
    let n = eigen.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("eigenvalues of a real symmetric matrix are finite")
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (slot, &idx) in order.iter().enumerate() {
        eigenvalues.push(eigen.eigenvalues[idx]);
        let mut column = eigen.eigenvectors.column(idx).into_owned();
        let ones_projection: f64 = column.iter().sum();
        let sign_source = if ones_projection != 0.0 {
            ones_projection
        } else {
            column
                .iter()
                .cloned()
                .find(|v| v.abs() > 1e-12)
                .unwrap_or(1.0)
        };
        if sign_source < 0.0 {
            column.neg_mut();
        }
        eigenvectors.set_column(slot, &column);
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// The quadratic Rényi entropy statistic of a Gram matrix:
/// V̂ = (1/N²)·Σᵢⱼ K(i,j), and the entropy Ĥ = −ln V̂.
pub fn renyi_estimate(gram: &GramMatrix) -> Result<(f64, f64)> {
    let n = gram.size() as f64;
    let v = gram.sum() / (n * n);
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::invalid(format!(
            "entropy statistic must be positive, got {v}"
        )));
    }
    Ok((v, -v.ln()))
}

/// Per-axis entropy contributions cᵢ = (1/N²)·(√λᵢ·eᵢᵀ1)². Eigenvalues in
/// [−1e-8·λmax, 0) are treated as 0; anything more negative means the input
/// was not positive semi-definite.
pub fn entropy_contributions(es: &EigenSystem, n: usize) -> Result<Vec<f64>> {
    let lambda_max = es.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let floor = -1e-8 * lambda_max.max(f64::MIN_POSITIVE);
    let nn = (n * n) as f64;
    es.eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            if lambda < floor {
                return Err(Error::NotPsd { eigenvalue: lambda });
            }
            let ones_projection: f64 = es.eigenvectors.column(i).iter().sum();
            Ok(lambda.max(0.0) * ones_projection * ones_projection / nn)
        })
        .collect()
}

/// One retained spectral axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub eigenvalue: f64,
    pub contribution: f64,
    pub vector: Vec<f64>,
}

/// Keep the top-`m` axes by entropy contribution, among those passing the
/// eigenvalue and eᵀ1 filters. Returns fewer than `m` when fewer pass.
pub fn select_axes(es: &EigenSystem, m: usize, tol_lambda: f64, tol_one: f64) -> Result<Vec<Axis>> {
    if m == 0 {
        return Err(Error::invalid("embedding dimension m must be ≥ 1"));
    }
    let n = es.len();
    let contributions = entropy_contributions(es, n)?;
    let lambda_max = es.eigenvalues.iter().cloned().fold(0.0, f64::max);

    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            let lambda = es.eigenvalues[i];
            let ones_projection: f64 = es.eigenvectors.column(i).iter().sum();
            lambda > tol_lambda * lambda_max && ones_projection.abs() > tol_one
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoUsableAxis);
    }
    candidates.sort_by(|&a, &b| {
        contributions[b]
            .partial_cmp(&contributions[a])
            .unwrap()
            .then(es.eigenvalues[b].partial_cmp(&es.eigenvalues[a]).unwrap())
            .then(a.cmp(&b))
    });
    candidates.truncate(m);

    Ok(candidates
        .into_iter()
        .map(|i| Axis {
            eigenvalue: es.eigenvalues[i],
            contribution: contributions[i],
            vector: es.eigenvector(i).iter().cloned().collect(),
        })
        .collect())
}

/// A fitted KECA embedding: kernel, optional standardization, the
/// (standardized) training vectors needed for out-of-sample kernels, the
/// selected axes, and the training embeddings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KecaModel {
    pub kernel: KernelConfig,
    pub standardizer: Option<Standardizer>,
    pub train: Vec<Vec<f64>>,
    pub axes: Vec<Axis>,
    pub requested_m: usize,
    pub embeddings: Vec<Vec<f64>>,
}

impl KecaModel {
    pub fn embedding_dim(&self) -> usize {
        self.axes.len()
    }

    /// True when fewer usable axes existed than the requested m.
    pub fn reduced(&self) -> bool {
        self.axes.len() < self.requested_m
    }

    pub fn embeddings(&self) -> &[Vec<f64>] {
        &self.embeddings
    }

    /// Out-of-sample projection: standardize like the training data, take
    /// the kernel against every training point, and project onto axis j as
    /// zⱼ = (1/√λⱼ)·eⱼᵀk(x). For a training point this reproduces its
    /// training embedding row.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let prepared = match &self.standardizer {
            Some(s) => s.apply(x)?,
            None => {
                let d = self.train.first().map(Vec::len).unwrap_or(0);
                if x.len() != d {
                    return Err(Error::invalid(format!(
                        "dimension mismatch: model is {d}-dimensional, input is {}",
                        x.len()
                    )));
                }
                x.to_vec()
            }
        };
        let kx: Vec<f64> = self
            .train
            .iter()
            .map(|t| self.kernel.eval(t, &prepared))
            .collect::<Result<_>>()?;
        Ok(self
            .axes
            .iter()
            .map(|axis| {
                let projection: f64 = axis.vector.iter().zip(&kx).map(|(e, k)| e * k).sum();
                projection / axis.eigenvalue.sqrt()
            })
            .collect())
    }
}

/// Fit a KECA model: standardize (if configured), build the Gram matrix,
/// eigendecompose, select axes by entropy contribution, and embed every
/// training point as row i ↦ (√λⱼ·eⱼ(i))ⱼ.
pub fn fit(features: &[Vec<f64>], kernel: KernelConfig, m: usize) -> Result<KecaModel> {
    if features.len() < 2 {
        return Err(Error::invalid("KECA needs at least 2 training vectors"));
    }
    kernel.validate()?;
    let standardizer = if kernel.standardize {
        Some(Standardizer::fit(features)?)
    } else {
        None
    };
    let train = match &standardizer {
        Some(s) => s.apply_all(features)?,
        None => features.to_vec(),
    };
    let gram = gram_matrix(&train, &kernel)?;
    let es = eigendecompose(&gram)?;
    let axes = select_axes(&es, m, TOL_LAMBDA, TOL_ONE)?;

    let embeddings = (0..train.len())
        .map(|i| {
            axes.iter()
                .map(|axis| axis.eigenvalue.sqrt() * axis.vector[i])
                .collect()
        })
        .collect();

    Ok(KecaModel {
        kernel,
        standardizer,
        train,
        axes,
        requested_m: m,
        embeddings,
    })
}
