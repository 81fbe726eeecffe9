//! Brute-force reference implementations used by tests and the `selftest`
//! subcommand. Each routine recomputes its result from first principles —
//! literal summations, Monte-Carlo integration, exhaustive scans — sharing
//! nothing with the fast paths beyond the plain data types, so agreement is
//! meaningful evidence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dct::CoefficientGrid;
use crate::image::GrayImage;

/// Literal O(N⁴) double summation of the orthonormal 2D DCT-II. Ground truth
/// for `dct::dct2`, intended for small images (≤ 16×16 keeps tests quick).
pub fn dct2_direct(img: &GrayImage) -> CoefficientGrid {
    let (w, h) = (img.width(), img.height());
    let mut coeffs = vec![0.0; w * h];
    for u in 0..h {
        for v in 0..w {
            let su = if u == 0 {
                (1.0 / h as f64).sqrt()
            } else {
                (2.0 / h as f64).sqrt()
            };
            let sv = if v == 0 {
                (1.0 / w as f64).sqrt()
            } else {
                (2.0 / w as f64).sqrt()
            };
            let mut sum = 0.0;
            for y in 0..h {
                for x in 0..w {
                    sum += img.get(x, y)
                        * (std::f64::consts::PI * (2 * y + 1) as f64 * u as f64 / (2 * h) as f64).cos()
                        * (std::f64::consts::PI * (2 * x + 1) as f64 * v as f64 / (2 * w) as f64).cos();
                }
            }
            coeffs[u * w + v] = su * sv * sum;
        }
    }
    CoefficientGrid::new(w, h, coeffs).expect("dimensions preserved")
}

/// Zig-zag enumeration by simulating the walk itself (start at the DC cell,
/// move up-right / down-left, bouncing off the edges) rather than sorting
/// anti-diagonals. Ground truth for `dct::zigzag_order_rect`.
pub fn zigzag_walk(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(rows * cols);
    let (mut u, mut v) = (0usize, 0usize);
    let mut up = true;
    loop {
        order.push((u, v));
        if order.len() == rows * cols {
            return order;
        }
        if up {
            if v == cols - 1 {
                u += 1;
                up = false;
            } else if u == 0 {
                v += 1;
                up = false;
            } else {
                u -= 1;
                v += 1;
            }
        } else if u == rows - 1 {
            v += 1;
            up = true;
        } else if v == 0 {
            u += 1;
            up = true;
        } else {
            u += 1;
            v -= 1;
        }
    }
}

/// Monte-Carlo estimate of the arc-cosine kernel's defining Gaussian
/// integral: the mean of `2·Θ(w·x)·Θ(w·y)·(w·x)ⁿ·(w·y)ⁿ` over standard normal
/// `w`. Returns `(estimate, standard_error)`. Deterministic for a fixed seed.
pub fn arccos_kernel_mc(x: &[f64], y: &[f64], n: u32, samples: usize, seed: u64) -> (f64, f64) {
    assert_eq!(x.len(), y.len(), "dimension mismatch");
    assert!(samples >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = x.len();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let mut wx = 0.0;
        let mut wy = 0.0;
        for j in 0..d {
            let w: f64 = rng.sample(StandardNormal);
            wx += w * x[j];
            wy += w * y[j];
        }
        let t = if wx > 0.0 && wy > 0.0 {
            2.0 * wx.powi(n as i32) * wy.powi(n as i32)
        } else {
            0.0
        };
        sum += t;
        sum_sq += t * t;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    (mean, (var / samples as f64).sqrt())
}

/// Exhaustive per-coefficient entropy scan of one quantized block: recomputes
/// probabilities and the entropy score at every position from scratch and
/// returns `(zigzag_position, (u, v), coefficient_value, entropy)` of the
/// winner, ties resolved toward the earlier zig-zag position. Returns `None`
/// for an all-zero block. Ground truth for `entropy::extract_features`.
pub fn entropy_argmax_scan(
    block: &CoefficientGrid,
    shannon: bool,
    renyi_q: f64,
) -> Option<(usize, (usize, usize), f64, f64)> {
    let total: f64 = block.coeffs().iter().map(|c| c.abs()).sum();
    if total == 0.0 {
        return None;
    }
    let order = zigzag_walk(block.height(), block.width());
    let mut best: Option<(usize, (usize, usize), f64, f64)> = None;
    for (pos, &(u, v)) in order.iter().enumerate() {
        let c = block.get(u, v);
        let p = c.abs() / total;
        let e = if shannon {
            let mut e = 0.0;
            if p > 0.0 {
                e -= p * p.ln();
            }
            if p < 1.0 {
                e -= (1.0 - p) * (1.0 - p).ln();
            }
            e
        } else {
            (p.powf(renyi_q) + (1.0 - p).powf(renyi_q)).ln() / (1.0 - renyi_q)
        };
        match best {
            Some((_, _, _, best_e)) if e <= best_e => {}
            _ => best = Some((pos, (u, v), c, e)),
        }
    }
    best
}
