//! Render a synthetic labeled dataset to disk, ready for the CLI:
//!
//!     cargo run --example generate_dataset -- out-dir [subjects] [images] [seed]
//!     target/debug/entroface evaluate --manifest out-dir/manifest.csv --protocol ep1 --train 5
//!
//! Images are 92x112 PGM portraits; regeneration with the same arguments is
//! bit-identical.

use entroface::synth::{write_dataset, SynthSpec};
use std::path::PathBuf;

fn main() -> entroface::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synthetic-faces".into()));
    let mut spec = SynthSpec::default();
    if let Some(v) = args.next() {
        spec.subjects = v.parse().expect("subjects must be a number");
    }
    if let Some(v) = args.next() {
        spec.images_per_subject = v.parse().expect("images must be a number");
    }
    if let Some(v) = args.next() {
        spec.seed = v.parse().expect("seed must be a number");
    }

    let manifest = write_dataset(&spec, &dir)?;
    println!(
        "wrote {} images ({} subjects x {}, {}x{}, seed {}) and {}",
        spec.subjects * spec.images_per_subject,
        spec.subjects,
        spec.images_per_subject,
        spec.width,
        spec.height,
        spec.seed,
        manifest.display()
    );
    Ok(())
}
