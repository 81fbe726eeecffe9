//! Illumination-robust image recognition.
//!
//! The pipeline chains four stages:
//!
//! 1. **Illumination normalization** ([`illum`]) — work in the logarithm
//!    domain, equalize contrast, and discard the low-frequency DCT
//!    coefficients that carry most of the lighting variation, rewriting the
//!    DC term to a fixed target.
//! 2. **Entropy-guided features** ([`entropy`]) — split the image into 8×8
//!    blocks, DCT + JPEG-quantize each, and keep the single coefficient per
//!    block whose occurrence probability maximizes a binary entropy score
//!    (Shannon or Rényi).
//! 3. **Kernel entropy component analysis** ([`keca`]) — embed feature
//!    vectors with the eigen-axes of an uncentered kernel matrix, ranked by
//!    their contribution to a Rényi entropy estimate rather than by
//!    eigenvalue; arc-cosine and RBF kernels live in [`kernel`].
//! 4. **Nearest class mean** ([`classifier`]) — L2, cosine, or Mahalanobis
//!    distance to per-class mean embeddings.
//!
//! [`eval`] wires the stages into train/test protocols (fixed split and
//! leave-one-out) with JSON reporting, and [`oracle`] holds slow brute-force
//! references that double-check the numerics in tests and `selftest`.
//!
//! Everything is deterministic: no stage uses randomness, so identical inputs
//! and configuration produce byte-identical reports at any thread count.

pub mod classifier;
pub mod config;
pub mod dct;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod illum;
pub mod image;
pub mod keca;
pub mod kernel;
pub mod manifest;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod selftest;
pub mod synth;

pub use error::{Error, Result};
