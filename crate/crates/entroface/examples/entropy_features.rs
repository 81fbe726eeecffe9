//! Extract entropy-selected block features from an image and show which
//! DCT position each block elected.
//!
//!     cargo run --example entropy_features [input.pgm]

use entroface::dct::{dct2, quantize_block, scale_quant_matrix, zigzag_order};
use entroface::entropy::{
    block_partition, coefficient_probabilities, extract_features, renyi_map, EntropyConfig,
    Measure,
};
use entroface::illum::{normalize_illumination, IlluminationParams};
use entroface::image::load_pgm;
use entroface::synth::{synth_image, SynthSpec};

fn main() -> entroface::Result<()> {
    let raw = match std::env::args().nth(1) {
        Some(path) => load_pgm(path.as_ref())?,
        None => synth_image(&SynthSpec::default(), 3, 1),
    };
    // Features are extracted from the illumination-normalized image, as in
    // the full pipeline; on a raw image the DC term dominates every block.
    let image = normalize_illumination(&raw, &IlluminationParams::default())?;

    let cfg = EntropyConfig::default();
    let features = extract_features(&image, &cfg)?;
    println!(
        "{}x{} image -> {}x{} blocks of {} px -> {} features",
        image.width(),
        image.height(),
        features.blocks_x,
        features.blocks_y,
        cfg.block_size,
        features.values.len()
    );

    // Re-run the selection for a few blocks from the middle of the image,
    // keeping the winning position this time, to show what the feature
    // vector is made of.
    let blocks = block_partition(&image, cfg.block_size)?;
    let quant = scale_quant_matrix(cfg.quality)?;
    let order = zigzag_order(cfg.block_size);
    let mid = features.blocks_x * (features.blocks_y / 2);
    println!("\nblock  winning (u,v)  entropy   kept coefficient");
    for (b, block) in blocks.iter().enumerate().skip(mid).take(8) {
        let coeffs = quantize_block(&dct2(block), &quant)?;
        let probabilities = coefficient_probabilities(&coeffs)?;
        let scores = renyi_map(&probabilities, cfg.renyi_order)?;
        let (mut best_pos, mut best_score) = ((0, 0), f64::NEG_INFINITY);
        for &(u, v) in &order {
            let s = scores[u * cfg.block_size + v];
            if s > best_score {
                best_score = s;
                best_pos = (u, v);
            }
        }
        println!(
            "{b:>5}  {:>12}  {best_score:>7.4}  {:>16.3}",
            format!("({}, {})", best_pos.0, best_pos.1),
            features.values[b]
        );
    }

    // Tally the winning position across all blocks. Smooth blocks elect the
    // DC slot (its probability mass sits nearest 1/2); textured blocks hand
    // the win to low-frequency AC positions.
    let mut tally: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
    for block in &blocks {
        let coeffs = quantize_block(&dct2(block), &quant)?;
        let probabilities = coefficient_probabilities(&coeffs)?;
        let scores = renyi_map(&probabilities, cfg.renyi_order)?;
        let (mut winner, mut best) = ((0, 0), f64::NEG_INFINITY);
        for &(u, v) in &order {
            let s = scores[u * cfg.block_size + v];
            if s > best {
                best = s;
                winner = (u, v);
            }
        }
        *tally.entry(winner).or_default() += 1;
    }
    println!("\nwinning positions across all {} blocks:", blocks.len());
    let mut counts: Vec<_> = tally.into_iter().collect();
    counts.sort_by_key(|&(_, c)| std::cmp::Reverse(c));
    for ((u, v), count) in counts {
        println!("  ({u}, {v}): {count}");
    }

    // Shannon and Rényi agree on ranking, so the selected positions match.
    let shannon = extract_features(
        &image,
        &EntropyConfig {
            measure: Measure::Shannon,
            ..cfg
        },
    )?;
    let agree = features
        .values
        .iter()
        .zip(&shannon.values)
        .filter(|(a, b)| a == b)
        .count();
    println!(
        "\nShannon-selected features agree with Rényi on {agree}/{} blocks",
        features.values.len()
    );
    Ok(())
}
