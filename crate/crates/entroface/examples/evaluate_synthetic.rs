//! The full recognition pipeline on a rendered dataset: EP1 fixed splits,
//! leave-one-out, and the raw-pixel baseline they are measured against.
//!
//!     cargo run --release --example evaluate_synthetic
//!
//! (Release mode recommended: leave-one-out refits the embedding once per
//! image.)

use entroface::config::PipelineConfig;
use entroface::eval::{
    baseline_raw_pixels, run_loo, run_pipeline, split_ep1, EvaluationReport,
};
use entroface::manifest::DatasetManifest;
use entroface::synth::{write_dataset, SynthSpec};

fn show(report: &EvaluationReport) {
    println!(
        "{:<22} {:<20} accuracy {:.4} ({}/{})  macro sens {:.4}  macro spec {:.4}",
        report.protocol,
        report.method,
        report.accuracy,
        report.correct,
        report.total,
        report.macro_sensitivity,
        report.macro_specificity
    );
    for w in &report.warnings {
        println!("    warning: {w}");
    }
}

fn main() -> entroface::Result<()> {
    let dir = std::env::temp_dir().join("entroface-evaluate-example");
    let spec = SynthSpec {
        subjects: 10,
        images_per_subject: 8,
        width: 64,
        height: 80,
        seed: 4,
    };
    let manifest_path = write_dataset(&spec, &dir)?;
    let manifest = DatasetManifest::load(&manifest_path)?;
    println!(
        "rendered {} subjects x {} images at {}x{} -> {}\n",
        spec.subjects,
        spec.images_per_subject,
        spec.width,
        spec.height,
        dir.display()
    );

    let cfg = PipelineConfig::default();
    for n_train in [5, 2] {
        let split = split_ep1(&manifest, n_train)?;
        show(&run_pipeline(&manifest, &split, &cfg)?);
        show(&baseline_raw_pixels(&manifest, &split, &cfg)?);
    }
    show(&run_loo(&manifest, &cfg)?);

    println!("\nThe raw-pixel baseline collapses under the synthetic exposure");
    println!("changes (gain 0.5–2x) that the normalization stage removes.");
    Ok(())
}
