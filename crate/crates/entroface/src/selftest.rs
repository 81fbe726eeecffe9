//! Embedded invariant suite behind the `selftest` CLI subcommand.
//!
//! These checks re-verify, on every installation, the numeric identities
//! the whole pipeline rests on: the DCT inverts exactly, the two Rényi
//! estimator forms agree, and the closed-form arc-cosine kernels match
//! their defining Gaussian integral. All inputs are generated from fixed
//! seeds, so a pass/fail outcome is reproducible.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dct::{dct2, idct2, zigzag_order};
use crate::illum::{normalize_illumination, DcTarget, IlluminationParams};
use crate::image::GrayImage;
use crate::keca::{eigendecompose, entropy_contributions, renyi_estimate};
use crate::kernel::{arc_cosine_kernel, GramMatrix};
use crate::oracle::arccos_kernel_mc;

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    let pixels = (0..w * h).map(|_| rng.gen_range(0.0..255.0)).collect();
    GrayImage::new(w, h, pixels, 255.0).expect("positive dimensions")
}

fn dct_round_trip() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0C7);
    let mut worst_round = 0.0f64;
    let mut worst_parseval = 0.0f64;
    let sizes = [(8, 8), (8, 8), (8, 8), (8, 8), (32, 32), (17, 9)];
    for &(w, h) in &sizes {
        let img = random_image(&mut rng, w, h);
        let coeffs = dct2(&img);
        let back = idct2(&coeffs);
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            worst_round = worst_round.max((a - b).abs());
        }
        let pixel_energy: f64 = img.pixels().iter().map(|p| p * p).sum();
        let coeff_energy: f64 = coeffs.coeffs().iter().map(|c| c * c).sum();
        worst_parseval = worst_parseval.max((pixel_energy - coeff_energy).abs() / pixel_energy);
    }
    CheckOutcome {
        name: "dct round trip + energy conservation",
        passed: worst_round < 1e-9 && worst_parseval < 1e-9,
        detail: format!(
            "max round-trip error {worst_round:.2e}, max relative energy error {worst_parseval:.2e}"
        ),
    }
}

fn renyi_estimator_identity() -> CheckOutcome {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9E9A + seed);
        let n = rng.gen_range(3..=25);
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let k = &a * a.transpose();
        let gram = GramMatrix::from_matrix((&k + k.transpose()) * 0.5).expect("symmetric");
        let (v_hat, _) = renyi_estimate(&gram).expect("nonempty Gram");
        let es = eigendecompose(&gram).expect("eigendecomposition");
        let contributions = entropy_contributions(&es, gram.size()).expect("PSD input");
        let sum: f64 = contributions.iter().sum();
        worst = worst.max((v_hat - sum).abs() / v_hat.abs().max(1e-300));
    }
    CheckOutcome {
        name: "quadratic entropy estimator: Gram-sum form ≡ spectral form",
        passed: worst < 1e-10,
        detail: format!("max relative disagreement {worst:.2e} over 20 random PSD matrices"),
    }
}

fn kernel_monte_carlo() -> CheckOutcome {
    let pairs: [(&[f64], &[f64], u32); 3] = [
        (&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 0),
        (&[0.8, 0.3, -0.2], &[0.5, 0.9, 0.1], 1),
        (&[0.9, 0.5, 0.2], &[0.6, 1.0, -0.3], 2),
    ];
    let mut detail = String::new();
    let mut passed = true;
    for (i, (x, y, n)) in pairs.iter().enumerate() {
        let exact = arc_cosine_kernel(x, y, *n).expect("valid inputs");
        let (estimate, stderr) = arccos_kernel_mc(x, y, *n, 200_000, 0xACC0 + i as u64);
        let tolerance = (5.0 * stderr).max(0.03 * exact.abs());
        let ok = (estimate - exact).abs() <= tolerance;
        passed &= ok;
        if i > 0 {
            detail.push_str("; ");
        }
        detail.push_str(&format!(
            "n={n}: closed form {exact:.4}, Monte-Carlo {estimate:.4} ± {stderr:.4}"
        ));
    }
    CheckOutcome {
        name: "arc-cosine kernels match their Gaussian integral",
        passed,
        detail,
    }
}

fn zigzag_is_permutation() -> CheckOutcome {
    let mut ok = true;
    for n in [2usize, 4, 8, 16] {
        let order = zigzag_order(n);
        let mut seen = vec![false; n * n];
        for &(u, v) in &order {
            if u >= n || v >= n || seen[u * n + v] {
                ok = false;
            } else {
                seen[u * n + v] = true;
            }
        }
        ok &= seen.iter().all(|&s| s);
        ok &= order.first() == Some(&(0, 0)) && order.get(1) == Some(&(0, 1));
    }
    CheckOutcome {
        name: "zig-zag scan is a complete permutation starting (0,0),(0,1)",
        passed: ok,
        detail: "orders 2, 4, 8, 16 verified".into(),
    }
}

fn gain_invariance() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6A1E);
    let base = GrayImage::from_fn(32, 32, 255.0, |x, y| {
        55.0 + 25.0 * ((x as f64) * 0.4).sin() + 20.0 * ((y as f64) * 0.23).cos()
    });
    let params = IlluminationParams {
        equalize: false,
        dc_target: DcTarget::Fixed(crate::illum::DEFAULT_DC_TARGET),
        ..IlluminationParams::default()
    };
    let reference = normalize_illumination(&base, &params).expect("normalizes");
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let c = rng.gen_range(0.5..2.0);
        let scaled = base.map(|p| p * c);
        let out = normalize_illumination(&scaled, &params).expect("normalizes");
        for (a, b) in reference.pixels().iter().zip(out.pixels()) {
            worst = worst.max((a - b).abs());
        }
    }
    CheckOutcome {
        name: "illumination gain cancels after normalization",
        passed: worst < 1e-6,
        detail: format!("max pixel deviation {worst:.2e} across gains in [0.5, 2)"),
    }
}

/// Run every embedded check; never panics on failure — outcomes report it.
pub fn run_selftest() -> Vec<CheckOutcome> {
    vec![
        dct_round_trip(),
        renyi_estimator_identity(),
        kernel_monte_carlo(),
        zigzag_is_permutation(),
        gain_invariance(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_embedded_check_passes() {
        let outcomes = run_selftest();
        for o in &outcomes {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
        assert!(all_passed(&outcomes));
        assert_eq!(outcomes.len(), 5);
    }
}
