//! Normalize the illumination of an image and compare it against the same
//! image under a 4× brighter exposure.
//!
//!     cargo run --example normalize_image [input.pgm] [output-dir]
//!
//! Without arguments a synthetic portrait is rendered first, so the example
//! is self-contained.

use std::env;
use std::path::PathBuf;

use entroface::illum::{normalize_illumination, IlluminationParams};
use entroface::image::{load_pgm, rescale_for_display, save_pgm, GrayImage};
use entroface::synth::{synth_image, SynthSpec};

fn main() -> entroface::Result<()> {
    let mut args = env::args().skip(1);
    let input = args.next();
    let out_dir = PathBuf::from(
        args.next()
            .unwrap_or_else(|| env::temp_dir().join("entroface-normalize").display().to_string()),
    );
    std::fs::create_dir_all(&out_dir).expect("output directory");

    let image: GrayImage = match &input {
        Some(path) => load_pgm(path.as_ref())?,
        None => synth_image(&SynthSpec::default(), 1, 1),
    };
    println!(
        "input: {} ({}x{}, mean {:.1})",
        input.as_deref().unwrap_or("<synthetic portrait>"),
        image.width(),
        image.height(),
        image.mean()
    );

    let params = IlluminationParams::default();
    let normalized = normalize_illumination(&image, &params)?;
    save_pgm(&rescale_for_display(&image), &out_dir.join("original.pgm"))?;
    save_pgm(&rescale_for_display(&normalized), &out_dir.join("normalized.pgm"))?;

    // The same scene under a different exposure should normalize to nearly
    // the same output — that is the whole point of the stage.
    let brighter = image.map(|p| (p * 4.0).min(4.0 * image.depth()));
    let normalized_bright = normalize_illumination(&brighter, &params)?;
    save_pgm(
        &rescale_for_display(&normalized_bright),
        &out_dir.join("normalized_bright.pgm"),
    )?;

    let max_gap = normalized
        .pixels()
        .iter()
        .zip(normalized_bright.pixels())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let spread = |img: &GrayImage| {
        let lo = img.pixels().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = img.pixels().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (lo, hi) = spread(&normalized);
    println!("normalized value range: [{lo:.1}, {hi:.1}]");
    println!("after a 4x exposure change, outputs differ by at most {max_gap:.2e}");
    println!("wrote original.pgm, normalized.pgm, normalized_bright.pgm to {}", out_dir.display());
    Ok(())
}
