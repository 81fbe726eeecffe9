//! Thin command-line front end; all logic lives in the library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entroface::config::{parse_config, PipelineConfig};
use entroface::error::{Error, Result};
use entroface::eval::{
    baseline_loo, baseline_raw_pixels, run_loo, run_pipeline, split_ep1, EvaluationReport,
};
use entroface::image::{load_pgm, rescale_for_display, save_pgm};
use entroface::manifest::DatasetManifest;
use entroface::model::{load_model, save_model};
use entroface::pipeline::{features_from_manifest, fit_model, prepare_image};
use entroface::selftest::{all_passed, run_selftest};

#[derive(Parser)]
#[command(
    name = "entroface",
    version,
    about = "Illumination-robust image recognition: DCT normalization, \
             entropy-selected block features, kernel entropy component \
             analysis, nearest-class-mean classification."
)]
struct Cli {
    /// Worker threads for parallel sections (default: all logical cores).
    /// Results are identical at any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize the illumination of a single PGM image.
    Normalize {
        /// Input image (PGM, P2 or P5).
        #[arg(long)]
        input: PathBuf,
        /// Where to write the normalized image (always binary P5).
        #[arg(long)]
        output: PathBuf,
        /// Pipeline configuration file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Extract entropy-selected features for every manifest entry.
    Extract {
        /// Dataset manifest CSV (`path,subject_id,index`).
        #[arg(long)]
        manifest: PathBuf,
        /// Output CSV: `path,subject_id,v1..vB`, one row per entry.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train a recognizer on a labeled manifest and save the model.
    Fit {
        #[arg(long)]
        manifest: PathBuf,
        /// Where to write the trained model.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Classify images with a trained model.
    Classify {
        /// Model file produced by `fit`.
        #[arg(long)]
        model: PathBuf,
        /// Write `path,predicted_label,distance` CSV here (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Images to classify.
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Run a train/test protocol and write an evaluation report.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        /// ep1 (first-n-per-subject train) or loo (leave-one-out).
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        /// Training images per subject (EP1 only).
        #[arg(long, default_value_t = 5)]
        train: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report JSON destination.
        #[arg(long, default_value = "report.json")]
        report: PathBuf,
        /// Also write a flat CSV summary here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also run the raw-pixel nearest-mean baseline on the same split
        /// and write it next to the report as `<stem>.baseline.json`.
        #[arg(long)]
        baseline: bool,
    },
    /// Run the embedded numeric invariant suite.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Ep1,
    Loo,
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig> {
    match path {
        Some(p) => parse_config(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn format_row(path: &Path, label: &str, values: &[f64]) -> String {
    let mut row = format!("{},{}", path.display(), label);
    for v in values {
        row.push(',');
        row.push_str(&format!("{v}"));
    }
    row.push('\n');
    row
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn summarize(report: &EvaluationReport) {
    println!(
        "{} {}: accuracy {:.4} ({}/{}), macro sensitivity {:.4}, macro specificity {:.4}",
        report.protocol,
        report.method,
        report.accuracy,
        report.correct,
        report.total,
        report.macro_sensitivity,
        report.macro_specificity
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
}

fn baseline_path(report: &Path) -> PathBuf {
    match report.extension() {
        Some(ext) => report.with_extension(format!("baseline.{}", ext.to_string_lossy())),
        None => report.with_extension("baseline"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Normalize { input, output, config } => {
            let cfg = load_config(&config)?;
            let img = load_pgm(&input)?;
            let normalized = prepare_image(&img, &cfg)?;
            save_pgm(&rescale_for_display(&normalized), &output)?;
            println!("normalized {} -> {}", input.display(), output.display());
            Ok(true)
        }
        Command::Extract { manifest, out, config } => {
            let cfg = load_config(&config)?;
            let manifest = DatasetManifest::load(&manifest)?;
            let data = features_from_manifest(&manifest, &cfg)?;
            let width = data.features.first().map(Vec::len).unwrap_or(0);
            let mut text = String::from("path,subject_id");
            for i in 1..=width {
                text.push_str(&format!(",v{i}"));
            }
            text.push('\n');
            for ((entry, label), values) in manifest
                .entries()
                .iter()
                .zip(&data.labels)
                .zip(&data.features)
            {
                text.push_str(&format_row(&entry.path, label, values));
            }
            write_text(&out, &text)?;
            println!(
                "extracted {} rows x {} features -> {}",
                data.len(),
                width,
                out.display()
            );
            if data.degenerate_blocks > 0 {
                eprintln!(
                    "warning: {} block(s) quantized to all zeros",
                    data.degenerate_blocks
                );
            }
            Ok(true)
        }
        Command::Fit { manifest, model, config } => {
            let cfg = load_config(&config)?;
            let manifest = DatasetManifest::load(&manifest)?;
            let data = features_from_manifest(&manifest, &cfg)?;
            let trained = fit_model(&data.features, &data.labels, &cfg)?;
            save_model(&trained, &model)?;
            println!(
                "fitted {} classes from {} images ({} embedding axes) -> {}",
                trained.classifier.means.len(),
                data.len(),
                trained.keca.embedding_dim(),
                model.display()
            );
            if trained.keca.reduced() {
                eprintln!(
                    "warning: requested m = {} but only {} usable axes existed",
                    cfg.m,
                    trained.keca.embedding_dim()
                );
            }
            Ok(true)
        }
        Command::Classify { model, out, images } => {
            let trained = load_model(&model)?;
            let mut text = String::from("path,predicted_label,distance\n");
            for path in &images {
                let img =
                    load_pgm(path).map_err(|e| e.in_stage("load", path.display().to_string()))?;
                let (label, distance) = trained
                    .predict_image(&img)
                    .map_err(|e| e.in_stage("classify", path.display().to_string()))?;
                text.push_str(&format!("{},{label},{distance}\n", path.display()));
            }
            match out {
                Some(p) => {
                    write_text(&p, &text)?;
                    println!("classified {} image(s) -> {}", images.len(), p.display());
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Evaluate {
            manifest,
            protocol,
            train,
            config,
            report,
            csv,
            baseline,
        } => {
            let cfg = load_config(&config)?;
            let manifest = DatasetManifest::load(&manifest)?;
            let (main_report, baseline_report) = match protocol {
                ProtocolArg::Ep1 => {
                    let split = split_ep1(&manifest, train)?;
                    let main = run_pipeline(&manifest, &split, &cfg)?;
                    let base = baseline
                        .then(|| baseline_raw_pixels(&manifest, &split, &cfg))
                        .transpose()?;
                    (main, base)
                }
                ProtocolArg::Loo => {
                    let main = run_loo(&manifest, &cfg)?;
                    let base = baseline.then(|| baseline_loo(&manifest, &cfg)).transpose()?;
                    (main, base)
                }
            };
            main_report.write_json(&report)?;
            summarize(&main_report);
            println!("report written to {}", report.display());
            if let Some(csv_path) = csv {
                main_report.write_csv(&csv_path)?;
                println!("summary written to {}", csv_path.display());
            }
            if let Some(base) = baseline_report {
                let path = baseline_path(&report);
                base.write_json(&path)?;
                summarize(&base);
                println!("baseline report written to {}", path.display());
            }
            Ok(true)
        }
        Command::Selftest => {
            let outcomes = run_selftest();
            for o in &outcomes {
                println!(
                    "{} {} — {}",
                    if o.passed { "ok  " } else { "FAIL" },
                    o.name,
                    o.detail
                );
            }
            Ok(all_passed(&outcomes))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be ≥ 1");
            return ExitCode::from(1);
        }
        // Errors only if a global pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
